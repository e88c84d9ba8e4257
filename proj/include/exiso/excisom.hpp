#pragma once

#include "exiso/exactnum.hpp"
#include "exiso/hermspace.hpp"
#include "exiso/linalg.hpp"
#include "exiso/rng.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace exiso {

// An element of GU_E(V) for a hermitian space with Gram G: a matrix g (rows =
// images of basis vectors, right action x -> x g on coordinate rows) with
// (xg, yg) = nu (x, y), i.e. g^rho G g^T ... in our row convention:
//   conj(g) * G * g^T = nu * G.
struct SimilitudeElement {
    Mat<QuadElem> m;
    Rat nu;
    QuadElem det;
};

namespace detail {

inline Mat<QuadElem> conj_mat(const Mat<QuadElem>& m) {
    return m.map([](const QuadElem& x) { return x.conj(); });
}

}  // namespace detail

// Verify the similitude property and assemble the element.
inline SimilitudeElement make_similitude(const Mat<QuadElem>& m, const Mat<QuadElem>& gram) {
    Mat<QuadElem> lhs = detail::conj_mat(m) * gram * m.transpose();
    // lhs should equal nu * gram for some nu in F^x.
    std::optional<QuadElem> nu;
    for (int i = 0; i < gram.rows() && !nu; ++i)
        for (int j = 0; j < gram.cols() && !nu; ++j)
            if (!(gram(i, j) == QuadElem(0))) nu = lhs(i, j) / gram(i, j);
    if (!nu) throw std::invalid_argument("make_similitude: zero Gram");
    if (!(lhs == gram.map([&](const QuadElem& x) { return x * *nu; })))
        throw std::invalid_argument("make_similitude: not a similitude");
    if (!nu->in_base_field()) throw std::invalid_argument("make_similitude: nu not in F");
    return SimilitudeElement{m, nu->a(), m.det()};
}

inline bool is_gsu(const SimilitudeElement& g) {
    return g.det == QuadElem::scalar(g.nu * g.nu, g.det.u());
}

// Projective class in GU_B(~V)^0 / F^x: a 6x6 matrix over E up to F^x.
// Canonical representative: scale by F^x so the first nonzero entry is 1 or i.
struct ProjClass {
    Mat<QuadElem> rep;

    static ProjClass of(const Mat<QuadElem>& m) {
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                const QuadElem& x = m(i, j);
                if (x == QuadElem(0)) continue;
                Rat s = x.a() != 0 ? x.a() : x.b();
                return ProjClass{m.scaled(QuadElem::scalar(Rat(1) / s, x.u()))};
            }
        throw std::invalid_argument("ProjClass: zero matrix");
    }
    bool operator==(const ProjClass& o) const { return rep == o.rep; }
};

// Lambda^2 of a 4x4 matrix on the wedge basis v_{ij} (lexicographic order):
// rows are images, (v_i ^ v_j) g = (v_i g) ^ (v_j g).
inline Mat<QuadElem> wedge2(const Mat<QuadElem>& g) {
    const auto& ps = detail::wedge_pairs();
    Mat<QuadElem> out(6, 6);
    for (int a = 0; a < 6; ++a) {
        auto [i, j] = ps[static_cast<size_t>(a)];
        for (int b = 0; b < 6; ++b) {
            auto [k, l] = ps[static_cast<size_t>(b)];
            out(a, b) = g(i, k) * g(j, l) - g(i, l) * g(j, k);
        }
    }
    return out;
}

// The isogeny GSU_E(V) -> GU_B(~V)^0, g -> wedge^2 g.
inline Mat<QuadElem> xi_tilde(const SimilitudeElement& g) {
    if (!is_gsu(g)) throw std::invalid_argument("xi_tilde: det(g) != nu(g)^2");
    return wedge2(g.m);
}

// The isomorphism PGU_E(V) -> PGU_B(~V)^0, g -> class of beta * wedge^2 g,
// where beta/beta^rho = nu^2/det.
inline ProjClass xi(const SimilitudeElement& g) {
    QuadElem alpha = QuadElem::scalar(g.nu * g.nu, g.det.u()) / g.det;
    QuadElem beta = hilbert90_beta(alpha);
    return ProjClass::of(wedge2(g.m).scaled(beta));
}

// --- Random elements of unitary groups -------------------------------------

// Generalized reflection attached to an anisotropic vector w and lambda in E^1:
// x -> x - w (w,w)^{-1} (w,x) (1 - lambda), unitary with det = lambda.
inline Mat<QuadElem> reflection(const Mat<QuadElem>& gram, const std::vector<QuadElem>& w,
                                const QuadElem& lambda) {
    int n = gram.rows();
    auto form = [&](const std::vector<QuadElem>& x, const std::vector<QuadElem>& y) {
        QuadElem acc(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                acc += x[static_cast<size_t>(i)].conj() * gram(i, j) * y[static_cast<size_t>(j)];
        return acc;
    };
    QuadElem ww = form(w, w);
    if (ww == QuadElem(0)) throw std::invalid_argument("reflection: isotropic vector");
    Mat<QuadElem> out(n, n);
    for (int i = 0; i < n; ++i) {
        std::vector<QuadElem> x(static_cast<size_t>(n), QuadElem(0));
        x[static_cast<size_t>(i)] = QuadElem::scalar(Rat(1), w[0].u());
        QuadElem c = form(w, x) * (QuadElem::scalar(Rat(1), w[0].u()) - lambda) / ww;
        for (int j = 0; j < n; ++j) out(i, j) = x[static_cast<size_t>(j)] - w[static_cast<size_t>(j)] * c;
    }
    return out;
}

// Random element of U_E(V) (nu = 1) as a short product of reflections.
inline Mat<QuadElem> random_unitary(Rng& rng, const Mat<QuadElem>& gram, int factors = 3) {
    int n = gram.rows();
    const Rat u = gram(0, 0) == QuadElem(0) ? gram(0, 1).u() : gram(0, 0).u();
    Mat<QuadElem> acc = Mat<QuadElem>::identity(n, QuadElem::scalar(Rat(1), u));
    auto form = [&](const std::vector<QuadElem>& x, const std::vector<QuadElem>& y) {
        QuadElem a(0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a += x[static_cast<size_t>(i)].conj() * gram(i, j) * y[static_cast<size_t>(j)];
        return a;
    };
    int placed = 0;
    while (placed < factors) {
        std::vector<QuadElem> w(static_cast<size_t>(n));
        for (auto& x : w) x = QuadElem(rng.small_rat(2, 2), rng.small_rat(2, 2), u);
        if (form(w, w) == QuadElem(0)) continue;
        CirclePoint lam = CirclePoint::random(rng, u);
        acc = acc * reflection(gram, w, lam.value());
        ++placed;
    }
    return acc;
}

// Random element of GSU_E(V): product of reflections with det 1, optionally
// times a central scalar (alpha in F^x or F^x i), which preserves the GSU
// condition det = nu^2.
inline SimilitudeElement random_gsu(Rng& rng, const Mat<QuadElem>& gram) {
    const Rat u = gram(0, 0) == QuadElem(0) ? gram(0, 1).u() : gram(0, 0).u();
    Mat<QuadElem> m = random_unitary(rng, gram, 2);
    SimilitudeElement g0 = make_similitude(m, gram);
    // fix determinant: divide out by a reflection with lambda = det(g0)
    QuadElem dt = g0.det;
    for (;;) {
        std::vector<QuadElem> w(static_cast<size_t>(gram.rows()));
        for (auto& x : w) x = QuadElem(rng.small_rat(2, 2), rng.small_rat(2, 2), u);
        QuadElem acc(0);
        for (int i = 0; i < gram.rows(); ++i)
            for (int j = 0; j < gram.cols(); ++j)
                acc += w[static_cast<size_t>(i)].conj() * gram(i, j) * w[static_cast<size_t>(j)];
        if (acc == QuadElem(0)) continue;
        m = m * reflection(gram, w, dt.inverse());
        break;
    }
    QuadElem scal = rng.coin() ? QuadElem::scalar(rng.nonzero_rat(3, 2), u)
                               : QuadElem(Rat(0), rng.nonzero_rat(3, 2), u);
    m = m.scaled(scal);
    SimilitudeElement g = make_similitude(m, gram);
    if (!is_gsu(g)) throw std::logic_error("random_gsu: construction failed");
    return g;
}

// Random element of GU_E(V): unitary times central scalar in E^x.
inline SimilitudeElement random_gu(Rng& rng, const Mat<QuadElem>& gram) {
    const Rat u = gram(0, 0) == QuadElem(0) ? gram(0, 1).u() : gram(0, 0).u();
    Mat<QuadElem> m = random_unitary(rng, gram, 2);
    QuadElem scal = random_quad_unit(rng, u, 3);
    return make_similitude(m.scaled(scal), gram);
}

// --- Subgroup restriction (V = V1 + V2, both 2-dimensional) ----------------

// GU_E(V_i) presented as pairs (b_i, alpha_i) in B_i^x x E^x acting on
// V_i = B_i by x -> b_i x alpha_i^{-1}.  The 2x2 E-matrix is taken w.r.t. the
// basis (1, j_i) of B_i.
inline Mat<QuadElem> gu2_matrix(const QuatElem& b, const QuadElem& alpha) {
    const QuatCtx& c = b.ctx();
    QuadElem ai = alpha.inverse();
    Mat<QuadElem> m(2, 2);
    auto put = [&](int row, const QuatElem& img) {
        // img = x + j y -> coordinates w.r.t. (1, j): (x, y^rho)? No:
        // z = x + j y = x + (y^rho) j ... we use basis (1, j) with RIGHT
        // E-coordinates: z = 1 * x + j * y, so coordinates are (x, y).
        m(row, 0) = img.x();
        m(row, 1) = img.y();
    };
    QuatElem e0 = QuatElem::one(c), e1 = QuatElem::gen_j(c);
    put(0, b * e0 * QuatElem::from_E(ai, c));
    put(1, b * e1 * QuatElem::from_E(ai, c));
    return m;
}

// nu and det of [(b, alpha)] acting on V_i: nu = nu(b) N(alpha)^{-1},
// det = nu(b) alpha^{-2}.
struct GU2Data {
    Mat<QuadElem> m;
    Rat nu;
    QuadElem det;
};
inline GU2Data gu2_data(const QuatElem& b, const QuadElem& alpha) {
    GU2Data d{gu2_matrix(b, alpha), b.nu() / alpha.norm(),
              QuadElem::scalar(b.nu(), alpha.u()) * alpha.pow(-2)};
    return d;
}

// --- Torus maps --------------------------------------------------------------

// Split case: T = {(t1, t2, nu)} acting by
//   v1 t1, v2 t2, v3 nu (t1^rho)^{-1}, v4 nu (t2^rho)^{-1};
// its image in the torus ~T of GSO(V-dagger) is
//   (N(t1 t2), nu N(t1), nu t1 t2^rho).
struct SplitTorusImage {
    Rat t1, t2;      // eigenvalues on v-dagger_1, v-dagger_2
    QuadElem a;      // the E-coordinate a + b i acting on (v5, v6)
};

inline Mat<QuadElem> split_torus_matrix(const QuadElem& t1, const QuadElem& t2, const Rat& nu) {
    const Rat& u = t1.u();
    Mat<QuadElem> m(4, 4);
    m(0, 0) = t1;
    m(1, 1) = t2;
    m(2, 2) = QuadElem::scalar(nu, u) / t1.conj();
    m(3, 3) = QuadElem::scalar(nu, u) / t2.conj();
    return m;
}

inline SplitTorusImage torus_map_split(const QuadElem& t1, const QuadElem& t2, const Rat& nu) {
    return SplitTorusImage{(t1 * t2).norm(), nu * t1.norm(), t1 * t2.conj() * nu};
}

// Real case: T = {(z1, z2, z3, z4, r)} acting by v_i -> r z_i v_i; the image
// is (y1 y3 / y2 y4, y1 y4 / y2 y3, y1 y2 / y3 y4, r^2) for square roots
// y_i of z_i.
struct RealTorusImage {
    QuadElem z1, z2, z3;  // circle values a_k + b_k * (complex unit)
    Rat r2;
};

inline Mat<QuadElem> real_torus_matrix(const std::array<CirclePoint, 4>& z, const Rat& r) {
    const Rat& u = z[0].value().u();
    Mat<QuadElem> m(4, 4);
    for (int i = 0; i < 4; ++i) m(i, i) = z[static_cast<size_t>(i)].value() * r;
    return m;
}

inline RealTorusImage torus_map_real(const std::array<CirclePoint, 4>& y, const Rat& r) {
    QuadElem y1 = y[0].value(), y2 = y[1].value(), y3 = y[2].value(), y4 = y[3].value();
    return RealTorusImage{y1 * y3 / (y2 * y4), y1 * y4 / (y2 * y3), y1 * y2 / (y3 * y4), r * r};
}

// --- The weight-lattice map --------------------------------------------------

// (l1, l2, l3) with even sum -> the sum-zero 4-tuple
// ((l1+l2+l3)/2, (-l1-l2+l3)/2, (l1-l2-l3)/2, (-l1+l2-l3)/2).
inline std::array<long, 4> weight_map(const std::array<long, 3>& l) {
    long s = l[0] + l[1] + l[2];
    if (s % 2 != 0) throw std::invalid_argument("weight_map: l1 + l2 + l3 must be even");
    return {(l[0] + l[1] + l[2]) / 2, (-l[0] - l[1] + l[2]) / 2, (l[0] - l[1] - l[2]) / 2,
            (-l[0] + l[1] - l[2]) / 2};
}

// Inverse: (k1, k2, k3, k4) with zero sum -> (k1 + k3, k1 + k4, k1 + k2).
inline std::array<long, 3> weight_map_inverse(const std::array<long, 4>& k) {
    if (k[0] + k[1] + k[2] + k[3] != 0)
        throw std::invalid_argument("weight_map_inverse: coordinates must sum to zero");
    return {k[0] + k[2], k[0] + k[3], k[0] + k[1]};
}

inline std::array<long, 4> dominant_sort(std::array<long, 4> k) {
    std::sort(k.begin(), k.end(), std::greater<long>());
    return k;
}

}  // namespace exiso
