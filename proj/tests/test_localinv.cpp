#include <catch2/catch_amalgamated.hpp>

#include "exiso/localinv.hpp"
#include "exiso/rng.hpp"

#include <cmath>
#include <complex>

using namespace exiso;

namespace {

// Independent oracle: (a,b)_p by exhaustive solvability of z^2 = a x^2 + b y^2
// over Z/p^k with a primitive solution.
int hilbert_oracle_finite(long a, long b, long p) {
    long pk = 1;
    int k = (p == 2) ? 6 : 3;
    for (int i = 0; i < k; ++i) pk *= p;
    auto mod = [&](long x) { return ((x % pk) + pk) % pk; };
    for (long x = 0; x < pk; ++x)
        for (long y = 0; y < pk; ++y) {
            if (x % p == 0 && y % p == 0) continue;
            long rhs = mod(mod(a * mod(x * x)) + mod(b * mod(y * y)));
            for (long z = 0; z < pk; ++z)
                if (mod(z * z) == rhs) return 1;
        }
    return -1;
}

// Numeric Fresnel oracle: phase of int exp(pi i a x^2) dx via the regularized
// closed form 1/sqrt(eps - i a).
std::complex<double> fresnel_phase(double a) {
    std::complex<double> v = 1.0 / std::sqrt(std::complex<double>(1e-9, -a));
    return v / std::abs(v);
}

std::complex<double> eighth_value(const EighthRoot& r) {
    double th = M_PI * static_cast<double>(r.exponent()) / 4.0;
    return {std::cos(th), std::sin(th)};
}

// Numeric Gauss-sum oracle for the absolute index gamma(a * 1/2 psi) at p:
// the ball integral over p^{-m} Z_p, discretized at precision p^k Z_p (the
// integrand is locally constant at that scale), with psi_p(t) = e^{-2 pi i {t}_p}.
std::complex<double> gauss_oracle(const Rat& a, long p, int m, int k) {
    Int pmk = 1;
    for (int i = 0; i < m + k; ++i) pmk *= p;
    Int pm = 1;
    for (int i = 0; i < m; ++i) pm *= p;
    std::complex<double> acc(0, 0);
    for (Int y = 0; y < pmk; ++y) {
        Rat x = Rat(y) / Rat(pm);
        Rat t = a * x * x / 2;
        Int dd = den(t);
        Int dprime = dd;
        while (dprime % p == 0) dprime /= p;
        Int pe = dd / dprime;
        double frac = 0.0;
        if (pe != 1) {
            Int ninv = rat_mod(Rat(num(t)) / Rat(dprime), pe);
            frac = ninv.convert_to<double>() / pe.convert_to<double>();
        }
        double th = -2.0 * M_PI * frac;
        acc += std::complex<double>(std::cos(th), std::sin(th));
    }
    return acc / std::abs(acc);
}

}  // namespace

TEST_CASE("hilbert symbol basic values") {
    auto R = LocalPlace::reals();
    CHECK(hilbert_symbol(Rat(-1), Rat(-1), R) == -1);
    CHECK(hilbert_symbol(Rat(2), Rat(5), LocalPlace::prime(5)) == -1);
    CHECK(hilbert_symbol(Rat(2), Rat(5), LocalPlace::prime(5)) == hilbert_oracle_finite(2, 5, 5));
}

TEST_CASE("hilbert symbol against exhaustive oracle at odd p") {
    for (long p : {3l, 5l, 7l}) {
        for (long a : {1l, 2l, 3l, 5l, -1l, -2l, 10l})
            for (long b : {1l, 2l, 3l, 5l, -1l, -6l}) {
                INFO("p=" << p << " a=" << a << " b=" << b);
                CHECK(hilbert_symbol(Rat(a), Rat(b), LocalPlace::prime(p)) ==
                      hilbert_oracle_finite(a, b, p));
            }
    }
}

TEST_CASE("hilbert symbol: bimultiplicative, symmetric, (a,-a)=1, Steinberg") {
    Rng rng(5);
    std::vector<LocalPlace> places{LocalPlace::reals(), LocalPlace::prime(2), LocalPlace::prime(3),
                                   LocalPlace::prime(5), LocalPlace::prime(7)};
    for (auto& v : places) {
        for (int t = 0; t < 200; ++t) {
            Rat a = rng.nonzero_rat(9, 4), b = rng.nonzero_rat(9, 4), c = rng.nonzero_rat(9, 4);
            CHECK(hilbert_symbol(a * b, c, v) == hilbert_symbol(a, c, v) * hilbert_symbol(b, c, v));
            CHECK(hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v));
            CHECK(hilbert_symbol(a, -a, v) == 1);
            CHECK(hilbert_symbol(a, a, v) == hilbert_symbol(a, Rat(-1), v));
            if (a != 1) CHECK(hilbert_symbol(a, 1 - a, v) == 1);
            CHECK(hilbert_symbol(a * Rat(9, 4), b, v) == hilbert_symbol(a, b, v));
        }
    }
}

TEST_CASE("hilbert symbol product formula, exhaustive on the stated set") {
    std::vector<long> set{1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 10, -10};
    for (long a : set)
        for (long b : set) {
            int prod = 1;
            for (auto& v : symbol_support(Rat(a), Rat(b))) prod *= hilbert_symbol(Rat(a), Rat(b), v);
            INFO("a=" << a << " b=" << b);
            CHECK(prod == 1);
        }
}

TEST_CASE("weil index normalization at the real place (Fresnel oracle)") {
    auto R = LocalPlace::reals();
    CHECK(weil_index(Rat(1), R) == EighthRoot::one());
    CHECK(weil_index(Rat(-1), R).exponent() == 6);  // -i
    for (double a : {1.0, -1.0, 2.0, -3.0}) {
        auto expect = fresnel_phase(a) / fresnel_phase(1.0);
        auto got = eighth_value(weil_index(Rat(static_cast<long>(a)), R));
        CHECK(std::abs(expect - got) < 1e-4);
    }
    CHECK(std::abs(eighth_value(gamma_psi(R)) - fresnel_phase(1.0)) < 1e-4);
}

TEST_CASE("weil index at odd p against the Gauss-sum oracle") {
    for (long p : {3l, 5l, 7l, 11l, 13l}) {
        auto v = LocalPlace::prime(p);
        CHECK(gamma_psi(v) == EighthRoot::one());
        for (long a : {1l, 2l, 3l, 5l, 7l, -1l, -3l}) {
            if (a % p == 0) continue;
            CHECK(weil_index(Rat(a), v) == EighthRoot::one());
        }
        for (long un : {1l, 2l, 3l, -1l}) {
            if (un % p == 0) continue;
            auto got = eighth_value(weil_index(Rat(p * un), v));
            auto expect = gauss_oracle(Rat(p * un), p, 2, 4);
            INFO("p=" << p << " a=" << p * un);
            CHECK(std::abs(expect - got) < 1e-9);
        }
    }
}

TEST_CASE("weil index at p = 2 against the Gauss-sum oracle") {
    auto v = LocalPlace::prime(2);
    for (long a : {1l, 3l, 5l, 7l, -1l, -3l, 2l, 6l, 10l, 14l, -2l}) {
        auto got = eighth_value(weil_index(Rat(a), v) * gamma_psi(v));
        auto expect = gauss_oracle(Rat(a), 2, 3, 7);
        INFO("a=" << a);
        CHECK(std::abs(expect - got) < 1e-9);
    }
}

TEST_CASE("weil index cocycle relation and square-class dependence") {
    Rng rng(9);
    std::vector<LocalPlace> places{LocalPlace::reals(), LocalPlace::prime(2), LocalPlace::prime(3),
                                   LocalPlace::prime(5), LocalPlace::prime(7)};
    for (auto& v : places) {
        for (int t = 0; t < 100; ++t) {
            Rat a = rng.nonzero_rat(9, 4), b = rng.nonzero_rat(9, 4);
            CHECK(weil_index(a, v) * weil_index(b, v) / weil_index(a * b, v) ==
                  EighthRoot::from_sign(hilbert_symbol(a, b, v)));
            CHECK(weil_index(a * Rat(49, 9), v) == weil_index(a, v));
            CHECK(weil_index(a, v).pow(4) == EighthRoot::one());
        }
        CHECK(weil_index(Rat(-1), v) == gamma_psi(v).pow(-2));
        CHECK(gamma_psi(v).pow(8) == EighthRoot::one());
        CHECK(gamma_psi(v).pow(4) == EighthRoot::from_sign(hilbert_symbol(Rat(-1), Rat(-1), v)));
    }
}

TEST_CASE("weil index global product formula") {
    Rng rng(21);
    for (int t = 0; t < 120; ++t) {
        Rat a = rng.nonzero_rat(30, 12);
        EighthRoot prod = EighthRoot::one();
        for (auto& v : symbol_support(a, a)) prod = prod * weil_index(a, v);
        INFO("a=" << a);
        CHECK(prod == EighthRoot::one());
    }
}

TEST_CASE("hasse invariant") {
    auto R = LocalPlace::reals();
    CHECK(hasse_invariant({Rat(1), Rat(1), Rat(1)}, R) == 1);
    CHECK(hasse_invariant({Rat(-1), Rat(-1)}, R) == -1);
    Rng rng(31);
    std::vector<LocalPlace> places{R, LocalPlace::prime(2), LocalPlace::prime(3), LocalPlace::prime(5)};
    for (auto& v : places) {
        for (int t = 0; t < 60; ++t) {
            std::vector<Rat> d;
            int n = static_cast<int>(rng.uniform(2, 4));
            for (int i = 0; i < n; ++i) d.push_back(rng.nonzero_rat(6, 3));
            std::vector<Rat> d2(d.rbegin(), d.rend());
            CHECK(hasse_invariant(d, v) == hasse_invariant(d2, v));
            std::vector<Rat> d3 = d;
            d3[0] *= Rat(25, 16);
            CHECK(hasse_invariant(d, v) == hasse_invariant(d3, v));
            std::vector<Rat> w;
            for (int i = 0; i < 2; ++i) w.push_back(rng.nonzero_rat(6, 3));
            std::vector<Rat> vw = d;
            vw.insert(vw.end(), w.begin(), w.end());
            Rat dv(1), dw(1);
            for (auto& x : d) dv *= x;
            for (auto& x : w) dw *= x;
            CHECK(hasse_invariant(vw, v) ==
                  hasse_invariant(d, v) * hasse_invariant(w, v) * hilbert_symbol(dv, dw, v));
        }
    }
}

TEST_CASE("characters chi with chi|_F = xi_E") {
    Rat u(-1);
    auto v3 = LocalPlace::prime(3);
    auto chi = CharacterSpec::unramified_quadratic(u, v3);
    QuadElem p3 = QuadElem::scalar(Rat(3), u);
    auto val = chi_eval(chi, p3);
    REQUIRE(val.concrete());
    CHECK(*val.value == QuadElem::scalar(Rat(-1), u));
    CHECK(xi_E(u, Rat(3), v3) == -1);

    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        QuadElem x = random_quad_unit(rng, u);
        auto w = chi_eval(chi, x.conj() * x);
        REQUIRE(w.concrete());
        CHECK(*w.value == QuadElem::scalar(Rat(1), u));
        QuadElem y = random_quad_unit(rng, u);
        auto a = chi_eval(chi, x), b = chi_eval(chi, y), ab = chi_eval(chi, x * y);
        REQUIRE((a.concrete() && b.concrete() && ab.concrete()));
        CHECK(*ab.value == *a.value * *b.value);
    }

    auto cc = CharacterSpec::circle(u, 1);
    CirclePoint z(Rat(3, 5), Rat(4, 5), u);
    auto cv = chi_eval(cc, z.value());
    REQUIRE(cv.concrete());
    CHECK(*cv.value == z.value());
    auto cv2 = chi_eval(cc, z.value() * Rat(7));
    REQUIRE(cv2.concrete());
    CHECK(*cv2.value == z.value());
    auto cv3 = chi_eval(cc, QuadElem(Rat(1), Rat(1), u));
    CHECK_FALSE(cv3.concrete());

    auto sym = CharacterSpec::norm_class_symbolic(u, v3);
    auto sv = chi_eval(sym, QuadElem::scalar(Rat(6), u));
    REQUIRE(sv.concrete());
    CHECK(*sv.value == QuadElem::scalar(Rat(xi_E(u, Rat(6), v3)), u));
    auto sv2 = chi_eval(sym, QuadElem(Rat(1), Rat(2), u));
    CHECK_FALSE(sv2.concrete());
}
