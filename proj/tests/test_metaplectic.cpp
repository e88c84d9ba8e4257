#include <catch2/catch_amalgamated.hpp>

#include "exiso/metaplectic.hpp"
#include "exiso/rng.hpp"

using namespace exiso;

namespace {

const std::vector<LocalPlace> kPlaces{LocalPlace::reals(), LocalPlace::prime(3),
                                      LocalPlace::prime(5), LocalPlace::prime(7)};

Mat<Rat> random_symmetric(Rng& rng, int n, bool invertible = false) {
    for (;;) {
        Mat<Rat> b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                b(i, j) = rng.small_rat(2, 2);
                b(j, i) = b(i, j);
            }
        if (!invertible || b.det() != 0) return b;
    }
}

Mat<Rat> random_gl(Rng& rng, int n) {
    for (;;) {
        Mat<Rat> a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = Rat(rng.uniform(-2, 2));
        if (a.det() != 0) return a;
    }
}

}  // namespace

TEST_CASE("rao_decompose round trips and is choice independent") {
    Rng rng(81);
    for (int n : {1, 2, 4}) {
        // tau_j itself
        for (int j = 0; j <= n; ++j) {
            auto d = rao_decompose(sp_tau(n, j));
            CHECK(d.data.j == j);
            CHECK(same_square_class(d.data.x, Rat(1)));
        }
        // m(a): j = 0, x = det a
        for (int t = 0; t < 20; ++t) {
            Mat<Rat> a = random_gl(rng, n);
            auto d = rao_decompose(sp_m(a));
            CHECK(d.data.j == 0);
            CHECK(same_square_class(d.data.x, a.det()));
        }
        // constructed p1 tau_j p2 recovers (x, j)
        for (int t = 0; t < 100; ++t) {
            int j = static_cast<int>(rng.uniform(0, n));
            Mat<Rat> a1 = random_gl(rng, n), a2 = random_gl(rng, n);
            Mat<Rat> b1 = random_symmetric(rng, n), b2 = random_symmetric(rng, n);
            Mat<Rat> sigma = sp_m(a1) * sp_n(b1) * sp_tau(n, j) * sp_m(a2) * sp_n(b2);
            auto d = rao_decompose(sigma);
            CHECK(d.data.j == j);
            CHECK(same_square_class(d.data.x, a1.det() * a2.det()));
            CHECK(d.p1 * d.tau * d.p2 == sigma);
        }
    }
}

TEST_CASE("xj-conjugation rule x(d(nu) s d(nu)^{-1}) = nu^j x(s)") {
    Rng rng(83);
    int n = 2;
    for (int t = 0; t < 200; ++t) {
        Mat<Rat> sigma = random_sp(rng, n, 3);
        Rat nu = rng.nonzero_rat(3, 2);
        Mat<Rat> dn = sp_d(nu, n);
        auto d0 = rao_decompose(sigma);
        auto d1 = rao_decompose(dn * sigma * dn.inverse());
        CHECK(d1.data.j == d0.data.j);
        CHECK(same_square_class(d1.data.x, rat_pow(nu, d0.data.j) * d0.data.x));
    }
}

TEST_CASE("leray form basics") {
    int n = 1;
    auto X = Lagrangian::standard_X(n), Y = Lagrangian::standard_Y(n);
    CHECK(X.valid());
    CHECK(Y.valid());
    // L1 = L2: trivial form
    for (auto& v : kPlaces) CHECK(leray_gamma(Y, Y, X, v) == EighthRoot::one());
    // span(e), span(f), span(e+f): rank-1 form
    Mat<Rat> ef(1, 2);
    ef(0, 0) = Rat(1);
    ef(0, 1) = Rat(1);
    Lagrangian D{ef};
    auto diag = leray_form(X, Y, D);
    REQUIRE(diag.size() == 1);
    // the sign convention: computing directly, x1 = a e, x2 = b f, x3 = c(e+f),
    // a + c = 0, b + c = 0, Q = <<a e, b f>> = ab <<e, f>> = ab = c^2.
    CHECK(same_square_class(diag[0], Rat(1)));
}

TEST_CASE("leray invariance and antisymmetry") {
    Rng rng(87);
    int n = 2;
    for (int t = 0; t < 100; ++t) {
        Mat<Rat> g = random_sp(rng, n, 3);
        Lagrangian L1 = Lagrangian::standard_Y(n).acted(random_sp(rng, n, 2));
        Lagrangian L2 = Lagrangian::standard_Y(n).acted(random_sp(rng, n, 2));
        Lagrangian L3 = Lagrangian::standard_Y(n).acted(random_sp(rng, n, 2));
        REQUIRE(L1.valid());
        for (auto& v : kPlaces) {
            EighthRoot a = leray_gamma(L1, L2, L3, v);
            // simultaneous Sp action
            CHECK(leray_gamma(L1.acted(g), L2.acted(g), L3.acted(g), v) == a);
            // odd permutation inverts
            CHECK(leray_gamma(L2, L1, L3, v) == a.inverse());
            // cyclic permutation preserves
            CHECK(leray_gamma(L2, L3, L1, v) == a);
        }
    }
}

TEST_CASE("the four cocycle normalizations") {
    Rng rng(91);
    SECTION("z(tau_i, tau_j) = 1") {
        for (int n : {1, 2, 3})
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j)
                    for (auto& v : kPlaces)
                        CHECK(rao_cocycle(sp_tau(n, i), sp_tau(n, j), v) == EighthRoot::one());
    }
    SECTION("z(s, s^{-1}) = 1") {
        for (int n : {1, 2, 4})
            for (int t = 0; t < 60; ++t) {
                Mat<Rat> s = random_sp(rng, n, 3);
                for (auto& v : kPlaces) CHECK(rao_cocycle(s, s.inverse(), v) == EighthRoot::one());
            }
    }
    SECTION("P-invariance") {
        int n = 2;
        for (int t = 0; t < 60; ++t) {
            Mat<Rat> s1 = random_sp(rng, n, 2), s2 = random_sp(rng, n, 2);
            Mat<Rat> p1 = sp_m(random_gl(rng, n)) * sp_n(random_symmetric(rng, n));
            Mat<Rat> p2 = sp_m(random_gl(rng, n)) * sp_n(random_symmetric(rng, n));
            Mat<Rat> p = sp_m(random_gl(rng, n)) * sp_n(random_symmetric(rng, n));
            for (auto& v : kPlaces)
                CHECK(rao_cocycle(p1 * s1 * p, p.inverse() * s2 * p2, v) == rao_cocycle(s1, s2, v));
        }
    }
    SECTION("z(tau_n, n(b) tau_n) = gamma_psi^n gamma(det b) h(b)") {
        for (int n : {1, 2, 3}) {
            for (int t = 0; t < 40; ++t) {
                Mat<Rat> b = random_symmetric(rng, n, true);
                std::vector<Rat> diag = diagonalize_symmetric(b);
                for (auto& v : kPlaces) {
                    EighthRoot expect = gamma_psi(v).pow(n) * weil_index(b.det(), v) *
                                        EighthRoot::from_sign(hasse_invariant(diag, v));
                    CHECK(rao_cocycle(sp_tau(n, n), sp_n(b) * sp_tau(n, n), v) == expect);
                }
            }
        }
    }
}

TEST_CASE("2-cocycle identity on random triples in Sp4 and Sp8") {
    Rng rng(93);
    for (int n : {2, 4}) {
        for (int t = 0; t < 60; ++t) {
            Mat<Rat> s1 = random_sp(rng, n, 2), s2 = random_sp(rng, n, 2), s3 = random_sp(rng, n, 2);
            for (auto& v : kPlaces) {
                CHECK(rao_cocycle(s1, s2, v) * rao_cocycle(s1 * s2, s3, v) ==
                      rao_cocycle(s1, s2 * s3, v) * rao_cocycle(s2, s3, v));
            }
        }
    }
}

TEST_CASE("v-factor special values") {
    Rng rng(97);
    int n = 2;
    for (auto& v : kPlaces) {
        for (int t = 0; t < 40; ++t) {
            Mat<Rat> s = random_sp(rng, n, 3);
            CHECK(v_factor(s, Rat(1), v) == EighthRoot::one());
            Rat nu = rng.nonzero_rat(3, 2);
            // v(tau_n, nu) = gamma(nu)^{-n}
            CHECK(v_factor(sp_tau(n, n), nu, v) == weil_index(nu, v).pow(-n));
            // v(m(a), nu) = (det a, nu)
            Mat<Rat> a = random_gl(rng, n);
            CHECK(v_factor(sp_m(a), nu, v) ==
                  EighthRoot::from_sign(hilbert_symbol(a.det(), nu, v)));
        }
    }
}

TEST_CASE("gsp cocycle reduces to the Sp cocycle and handles d(nu) pairs") {
    Rng rng(101);
    int n = 2;
    for (auto& v : kPlaces) {
        for (int t = 0; t < 40; ++t) {
            Mat<Rat> s1 = random_sp(rng, n, 2), s2 = random_sp(rng, n, 2);
            CHECK(gsp_cocycle(s1, s2, v) == rao_cocycle(s1, s2, v));
            Rat nu = rng.nonzero_rat(3, 2);
            CHECK(gsp_cocycle(sp_d(nu, n), sp_d(nu, n).inverse(), v) == EighthRoot::one());
            // similitude mismatch rejected
            if (nu * nu != 1)
                CHECK_THROWS_AS(gsp_cocycle(sp_d(nu, n), sp_d(nu, n), v), std::invalid_argument);
        }
    }
}

TEST_CASE("doubling: z splits as a product over the two factors") {
    Rng rng(103);
    int n = 2;
    for (int t = 0; t < 30; ++t) {
        Mat<Rat> a1 = random_sp(rng, n, 2), a2 = random_sp(rng, n, 2);
        Mat<Rat> b1 = random_sp(rng, n, 2), b2 = random_sp(rng, n, 2);
        Mat<Rat> d1 = sp_double(a1, a2), d2 = sp_double(b1, b2);
        CHECK(is_sp(d1));
        CHECK(d1 * d2 == sp_double(a1 * b1, a2 * b2));
        for (auto& v : kPlaces) {
            CHECK(rao_cocycle(d1, d2, v) ==
                  rao_cocycle(a1, b1, v) * rao_cocycle(a2, b2, v).inverse());
        }
    }
}

TEST_CASE("sigma0 interchanges the polarizations and matches its printed form") {
    int n = 4;
    Mat<Rat> s0 = sp_sigma0(n);
    CHECK(is_sp(s0));
    // block structure: [[1/2, -1/2, 0, 0], [0, 0, 1/2, 1/2], [0, 0, 1, -1], [-1, -1, 0, 0]]
    Mat<Rat> expect(4 * n, 4 * n);
    auto I = Mat<Rat>::identity(n);
    expect.set_block(0, 0, I.scaled(Rat(1, 2)));
    expect.set_block(0, n, I.scaled(Rat(-1, 2)));
    expect.set_block(n, 2 * n, I.scaled(Rat(1, 2)));
    expect.set_block(n, 3 * n, I.scaled(Rat(1, 2)));
    expect.set_block(2 * n, 2 * n, I);
    expect.set_block(2 * n, 3 * n, I.scaled(Rat(-1)));
    expect.set_block(3 * n, 0, I.scaled(Rat(-1)));
    expect.set_block(3 * n, n, I.scaled(Rat(-1)));
    CHECK(s0 == expect);

    // X-square * s0 = V-nabla = {(x, -x)}; Y-square * s0 = V-triangle.
    // In doubled coordinates (p, q, r, s): nabla = {q = -p, s = r},
    // triangle = {q = p, s = -r}.
    Mat<Rat> xsq(2 * n, 4 * n);
    xsq.set_block(0, 0, Mat<Rat>::identity(2 * n));
    Mat<Rat> img = xsq * s0;
    for (int i = 0; i < 2 * n; ++i) {
        for (int k = 0; k < n; ++k) {
            CHECK(img(i, k) == -img(i, n + k));          // q = -p
            CHECK(img(i, 2 * n + k) == img(i, 3 * n + k));  // s = r
        }
    }
    Mat<Rat> ysq(2 * n, 4 * n);
    ysq.set_block(0, 2 * n, Mat<Rat>::identity(2 * n));
    Mat<Rat> img2 = ysq * s0;
    for (int i = 0; i < 2 * n; ++i) {
        for (int k = 0; k < n; ++k) {
            CHECK(img2(i, k) == img2(i, n + k));
            CHECK(img2(i, 2 * n + k) == -img2(i, 3 * n + k));
        }
    }
}

TEST_CASE("diagonalization tie-breaks do not change the Weil index") {
    Rng rng(107);
    for (int t = 0; t < 100; ++t) {
        int n = static_cast<int>(rng.uniform(1, 4));
        Mat<Rat> b = random_symmetric(rng, n);
        // two routes: plain, and after a random congruence (same form class)
        Mat<Rat> g = random_gl(rng, n);
        Mat<Rat> b2 = g * b * g.transpose();
        auto d1 = diagonalize_symmetric(b);
        auto d2 = diagonalize_symmetric(b2);
        CHECK(d1.size() == d2.size());
        for (auto& v : kPlaces) {
            CHECK(weil_index_form(d1, v) == weil_index_form(d2, v));
        }
    }
}
