#pragma once

#include "exiso/exactnum.hpp"
#include "exiso/linalg.hpp"
#include "exiso/localinv.hpp"

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

namespace exiso {

// Conjugate E-linear map x -> (x^rho) * M in row-vector convention, i.e.
// apply rho entrywise to the coordinate row, then multiply by the matrix.
// Composition: (f . g)(x) = f(g(x)); for two conjugate-linear maps the
// conjugations cancel and the matrices combine with one of them conjugated.
struct SemiLinMap {
    Mat<QuadElem> m;
    bool conj = true;

    std::vector<QuadElem> apply(const std::vector<QuadElem>& row) const {
        std::vector<QuadElem> v = row;
        if (conj)
            for (auto& x : v) x = x.conj();
        std::vector<QuadElem> out(static_cast<size_t>(m.cols()), QuadElem(0));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) out[static_cast<size_t>(j)] += v[static_cast<size_t>(i)] * m(i, j);
        return out;
    }

    // this . other (apply other first).
    SemiLinMap compose(const SemiLinMap& other) const {
        Mat<QuadElem> left = other.conj ? m.map([](const QuadElem& x) { return x.conj(); }) : m;
        return SemiLinMap{other.m * left, conj != other.conj};
    }

    SemiLinMap scaled_right(const QuadElem& s) const {  // x -> f(x) * s
        return SemiLinMap{m.scaled(s), conj};
    }
};

// Hermitian E-space with a distinguished basis and diagonal Gram entries in F.
struct HermSpace {
    Rat u;
    std::vector<Rat> gram;  // (v_i, v_i), all in F^x
    int dim() const { return static_cast<int>(gram.size()); }
};

// The trivialization d : wedge^4 V ~ E, recorded as d(v1^v2^v3^v4) in E^x.
struct Trivialization {
    QuadElem d;
    static Trivialization standard(const Rat& u) {  // d(v1^v2^v3^v4) = -1
        return Trivialization{QuadElem::scalar(Rat(-1), u)};
    }
};

namespace detail {

// Pairs (i, j), i < j, in lexicographic order; the wedge basis indexing.
inline const std::array<std::pair<int, int>, 6>& wedge_pairs() {
    static const std::array<std::pair<int, int>, 6> p = {
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
    return p;
}

inline int wedge_index(int i, int j) {
    const auto& ps = wedge_pairs();
    for (int k = 0; k < 6; ++k)
        if (ps[k].first == i && ps[k].second == j) return k;
    throw std::logic_error("wedge_index");
}

// Sign of the permutation (i, j, k, l) of (0,1,2,3); 0 if not a permutation.
inline int perm4_sign(int i, int j, int k, int l) {
    int a[4] = {i, j, k, l};
    for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y)
            if (a[x] == a[y]) return 0;
    int s = 1;
    for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y)
            if (a[x] > a[y]) s = -s;
    return s;
}

}  // namespace detail

// wedge^2 V of a 4-dimensional hermitian space, with the induced structures.
struct WedgeSpace {
    Rat u;
    Mat<QuadElem> herm;   // hermitian form (., .)_{~V} on the v_{ij} basis
    Mat<QuadElem> skew;   // skew-hermitian form (., .) = i * herm
    SemiLinMap L;         // conjugate-linear, x j = L(x)
    Mat<QuadElem> gram4;  // Gram of the underlying 4-space
    QuadElem dvol;        // d(v1^v2^v3^v4)

    // (x, y) for row vectors in the v_{ij} coordinates; conjugate-linear in x.
    QuadElem skew_form(const std::vector<QuadElem>& x, const std::vector<QuadElem>& y) const {
        QuadElem acc(0);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                acc += x[static_cast<size_t>(i)].conj() * skew(i, j) * y[static_cast<size_t>(j)];
        return acc;
    }

    // Right action of q = x_E + j y_E: v.q = v x_E + L(v) y_E.
    std::vector<QuadElem> act_right(const std::vector<QuadElem>& row, const QuatElem& q) const {
        std::vector<QuadElem> a = row, b = L.apply(row);
        for (auto& x : a) x = x * q.x();
        for (auto& x : b) x = x * q.y();
        for (size_t k = 0; k < a.size(); ++k) a[k] += b[k];
        return a;
    }
};

// General construction of L = psi^{-1} . iota . wedge^2 phi together with the
// induced forms, for an arbitrary nondegenerate Gram matrix over E (entries
// (v_i, v_j), conjugate-linear in the first argument).
inline WedgeSpace build_wedge(const Mat<QuadElem>& gram, const Trivialization& d, const Rat& u) {
    if (gram.rows() != 4 || gram.cols() != 4) throw std::invalid_argument("build_wedge: dim 4");
    const auto& ps = detail::wedge_pairs();
    QuadElem one = QuadElem::scalar(Rat(1), u);
    QuadElem iu = QuadElem::gen(u);

    // Hermitian form on wedge^2: h(v_ij, v_kl) = det [ (v_i,v_k) (v_i,v_l) ; (v_j,v_k) (v_j,v_l) ].
    Mat<QuadElem> herm(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            auto [i, j] = ps[static_cast<size_t>(a)];
            auto [k, l] = ps[static_cast<size_t>(b)];
            herm(a, b) = gram(i, k) * gram(j, l) - gram(i, l) * gram(j, k);
        }

    // wedge^2 phi (v_ij) = sum_{k<l} (G_ik G_jl - G_il G_jk) e_k ^ e_l, and
    // iota(e_k ^ e_l) = e_{kl}: so in the e_{kl} basis the matrix is the same.
    Mat<QuadElem> iw2phi(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            auto [i, j] = ps[static_cast<size_t>(a)];
            auto [k, l] = ps[static_cast<size_t>(b)];
            iw2phi(a, b) = gram(i, k) * gram(j, l) - gram(i, l) * gram(j, k);
        }

    // psi(v_ij)(v_kl) = d(v_i ^ v_j ^ v_k ^ v_l) = sign * d0.
    Mat<QuadElem> psi(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
            auto [i, j] = ps[static_cast<size_t>(a)];
            auto [k, l] = ps[static_cast<size_t>(b)];
            int s = detail::perm4_sign(i, j, k, l);
            psi(a, b) = s == 0 ? QuadElem(0) : d.d * Rat(s);
        }

    WedgeSpace w;
    w.u = u;
    w.herm = herm;
    w.skew = herm.map([&](const QuadElem& x) { return iu * x; });
    w.gram4 = gram;
    w.dvol = d.d;
    // L(v_ij) = psi^{-1}(iota wedge^2 phi (v_ij)); rows of the matrix are the
    // images of basis vectors.
    w.L = SemiLinMap{iw2phi * psi.inverse(), true};
    return w;
}

inline Mat<QuadElem> diag_gram(const HermSpace& V) {
    Mat<QuadElem> g(V.dim(), V.dim());
    for (int i = 0; i < V.dim(); ++i) g(i, i) = QuadElem::scalar(V.gram[static_cast<size_t>(i)], V.u);
    return g;
}

// build_L: the spec-named operation for diagonal input.
inline WedgeSpace build_L(const HermSpace& V, const Trivialization& d) {
    if (V.dim() != 4) throw std::invalid_argument("build_L: dim 4 required");
    return build_wedge(diag_gram(V), d, V.u);
}

// vol(H, d) = h(v, v) for the d-normalized generator v of wedge^4 V.
inline Rat volume(const HermSpace& V, const Trivialization& d) {
    Rat detg(1);
    for (auto& a : V.gram) detg *= a;
    Rat nd = d.d.norm();
    return detg / nd;
}

inline Rat volume(const Mat<QuadElem>& gram, const Trivialization& d) {
    QuadElem dg = gram.det();
    if (!dg.in_base_field()) throw std::domain_error("volume: det not in F");
    return dg.a() / d.d.norm();
}

// Check L^2 = J * id and return J.
inline Rat wedge_J(const WedgeSpace& w) {
    SemiLinMap L2 = w.L.compose(w.L);
    if (L2.conj) throw std::logic_error("wedge_J: L^2 not linear");
    QuadElem j = L2.m(0, 0);
    if (!j.in_base_field()) throw std::domain_error("wedge_J: L^2 not an F-scalar");
    Mat<QuadElem> expect = Mat<QuadElem>::identity(6).scaled(j);
    if (!(L2.m == expect)) throw std::domain_error("wedge_J: L^2 not scalar");
    return j.a();
}

// Quaternionic skew-hermitian space over B, with Gram matrix over B.
struct BSkewHermSpace {
    QuatCtx ctx;
    std::vector<int> basis;           // indices of the chosen B-basis among the v_{ij}
    Mat<QuatElem> gram_storage;       // stored row-major in `grams`
    std::vector<QuatElem> grams;      // rank x rank entries
    int rank = 0;

    const QuatElem& gram(int i, int j) const { return grams[static_cast<size_t>(i * rank + j)]; }
};

namespace detail {

// <x, y> = (x, y) - (1/J) j (x j, y) as an element of B.
inline QuatElem b_form(const WedgeSpace& w, const QuatCtx& ctx, const std::vector<QuadElem>& x,
                       const std::vector<QuadElem>& y) {
    std::vector<QuadElem> xj = w.L.apply(x);
    QuadElem first = w.skew_form(x, y);
    QuadElem second = w.skew_form(xj, y);
    // (x,y) + j * ( -(1/J) (xj, y) )
    return QuatElem(first, -second / ctx.J, ctx);
}

inline std::vector<QuadElem> unit_row(int n, int k, const Rat& u) {
    std::vector<QuadElem> r(static_cast<size_t>(n), QuadElem(0));
    r[static_cast<size_t>(k)] = QuadElem::scalar(Rat(1), u);
    return r;
}

}  // namespace detail

// Assemble the rank-3 B-space structure on wedge^2 V; verifies that the right
// B-action is well defined (L^2 = J) and that pr . <,> recovers (,).
inline BSkewHermSpace b_structure(const WedgeSpace& w, const Rat& expected_J) {
    Rat J = wedge_J(w);
    if (J != expected_J) throw std::invalid_argument("b_structure: L^2 != configured J");
    QuatCtx ctx(w.u, J);

    // Greedy B-basis: v is new if v, L(v) extend the E-span.
    std::vector<std::vector<QuadElem>> span;
    std::vector<int> basis;
    auto espan_rank = [&](const std::vector<std::vector<QuadElem>>& rows) {
        Mat<QuadElem> m(static_cast<int>(rows.size()), 6);
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < 6; ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        return m.rank();
    };
    for (int k = 0; k < 6 && basis.size() < 3; ++k) {
        auto cand = span;
        auto row = detail::unit_row(6, k, w.u);
        cand.push_back(row);
        cand.push_back(w.L.apply(row));
        if (espan_rank(cand) == static_cast<int>(cand.size())) {
            span = cand;
            basis.push_back(k);
        }
    }
    if (basis.size() != 3) throw std::domain_error("b_structure: no rank-3 B-basis found");

    BSkewHermSpace out{ctx, basis, Mat<QuatElem>(0, 0, QuatElem::scalar(Rat(0), ctx)), {}, 3};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.grams.push_back(detail::b_form(w, ctx, detail::unit_row(6, basis[static_cast<size_t>(i)], w.u),
                                               detail::unit_row(6, basis[static_cast<size_t>(j)], w.u)));
    return out;
}

// The decomposition wedge^2(V1 + V2) = V0# + V# for V = V1 + V2 (2+2), with
// the Gram data of both pieces. Requires the basis adapted to the splitting.
struct SharpSplit {
    // V0# = span(v_12, v_34); V# = span(v_13, v_14, v_23, v_24)
    QuatCtx ctx;
    std::vector<QuadElem> herm_v0;       // diagonal of hermitian form on (v12, v34)
    std::vector<QuadElem> herm_vsharp;   // diagonal on (v13, v23, v14, v24)
    Mat<QuatElem> bgram_vsharp;          // 2x2 B-skew-hermitian Gram on (v13, v23)
    QuatElem bgram_v0;                   // <v12, v12> over B
};

inline SharpSplit split_into_sharp(const WedgeSpace& w, const Rat& expected_J) {
    Rat J = wedge_J(w);
    if (J != expected_J) throw std::invalid_argument("split_into_sharp: L^2 != J");
    QuatCtx ctx(w.u, J);
    const int i12 = detail::wedge_index(0, 1), i34 = detail::wedge_index(2, 3);
    const int i13 = detail::wedge_index(0, 2), i14 = detail::wedge_index(0, 3);
    const int i23 = detail::wedge_index(1, 2), i24 = detail::wedge_index(1, 3);

    // L-stability of both subspaces.
    auto stable = [&](const std::vector<int>& idx) {
        for (int k : idx) {
            auto img = w.L.apply(detail::unit_row(6, k, w.u));
            for (int m = 0; m < 6; ++m) {
                bool inside = false;
                for (int q : idx) inside |= (q == m);
                if (!inside && !img[static_cast<size_t>(m)].is_zero()) return false;
            }
        }
        return true;
    };
    if (!stable({i12, i34}) || !stable({i13, i14, i23, i24}))
        throw std::invalid_argument("split_into_sharp: basis not adapted to V1 + V2");

    SharpSplit s{ctx, {}, {}, Mat<QuatElem>(2, 2, QuatElem::scalar(Rat(0), ctx)),
                 QuatElem::scalar(Rat(0), ctx)};
    s.herm_v0 = {w.herm(i12, i12), w.herm(i34, i34)};
    s.herm_vsharp = {w.herm(i13, i13), w.herm(i23, i23), w.herm(i14, i14), w.herm(i24, i24)};
    int bb[2] = {i13, i23};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            s.bgram_vsharp(i, j) = detail::b_form(w, ctx, detail::unit_row(6, bb[i], w.u),
                                                  detail::unit_row(6, bb[j], w.u));
    s.bgram_v0 = detail::b_form(w, ctx, detail::unit_row(6, i12, w.u), detail::unit_row(6, i12, w.u));
    return s;
}

// --- The two local models ---------------------------------------------------

enum class LocalCase { Split, Real };

struct LocalTables {
    WedgeSpace w;
    // Morita data: basis of V-dagger = ~V e expressed in the v_{ij} coordinates
    // (rows), and the symmetric F-valued Gram matrix of <.,.>-dagger on it.
    std::vector<std::vector<QuadElem>> vdagger;
    Mat<Rat> vdagger_gram;
    // B-basis of ~V over B (rows in v_{ij} coordinates).
    std::vector<std::vector<QuadElem>> btilde;
    Mat<QuatElem> btilde_gram;
    QuatCtx ctx;
};

namespace detail {

inline std::vector<QuadElem> lincomb(const Rat& u,
                                     std::initializer_list<std::pair<int, QuadElem>> terms) {
    std::vector<QuadElem> r(6, QuadElem(0));
    for (auto& [k, c] : terms) r[static_cast<size_t>(k)] += c;
    (void)u;
    return r;
}

}  // namespace detail

// The split local model: Gram (v_i, v_j) = 1 at (1,3),(2,4),(3,1),(4,2),
// d = +1. Produces the L table, both form tables, the B-basis ~v and the
// quadratic space V-dagger.
inline LocalTables local_tables_split(const Rat& u) {
    Mat<QuadElem> g(4, 4);
    QuadElem one = QuadElem::scalar(Rat(1), u);
    g(0, 2) = one; g(1, 3) = one; g(2, 0) = one; g(3, 1) = one;
    Trivialization d{QuadElem::scalar(Rat(1), u)};
    WedgeSpace w = build_wedge(g, d, u);
    Rat J = wedge_J(w);
    QuatCtx ctx(u, J);

    LocalTables t{w, {}, Mat<Rat>(6, 6), {}, Mat<QuatElem>(3, 3, QuatElem::scalar(Rat(0), ctx)), ctx};
    QuadElem iu = QuadElem::gen(u);
    const int i12 = detail::wedge_index(0, 1), i34 = detail::wedge_index(2, 3);
    const int i13 = detail::wedge_index(0, 2), i24 = detail::wedge_index(1, 3);
    const int i14 = detail::wedge_index(0, 3), i23 = detail::wedge_index(1, 2);

    // ~v_1 = v12 + v14, ~v_2 = v34 + v23, ~v_3 = v13.
    t.btilde = {detail::lincomb(u, {{i12, one}, {i14, one}}),
                detail::lincomb(u, {{i34, one}, {i23, one}}),
                detail::lincomb(u, {{i13, one}})};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t.btilde_gram(i, j) = detail::b_form(w, ctx, t.btilde[static_cast<size_t>(i)],
                                                 t.btilde[static_cast<size_t>(j)]);

    // V-dagger basis: v1 = v12, v2 = (i/u) v14, v3 = v34, v4 = (i/u) v23,
    // v5 = (v13 + v24)/2, v6 = (i/2u)(v13 - v24).
    QuadElem iou = iu / u;
    t.vdagger = {detail::lincomb(u, {{i12, one}}),
                 detail::lincomb(u, {{i14, iou}}),
                 detail::lincomb(u, {{i34, one}}),
                 detail::lincomb(u, {{i23, iou}}),
                 detail::lincomb(u, {{i13, one / Rat(2)}, {i24, one / Rat(2)}}),
                 detail::lincomb(u, {{i13, iou / Rat(2)}, {i24, -iou / Rat(2)}})};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            // <x,y>-dagger e'' = (1/2) <x,y>; with e'' = (i + ij)/(2u) this
            // pins <x,y>-dagger = u/(b + d) off the i + ij part when present;
            // concretely <x,y> must be a multiple of (i + ij) and the dagger
            // value is u * that multiple.
            QuatElem v = detail::b_form(w, ctx, t.vdagger[static_cast<size_t>(i)],
                                        t.vdagger[static_cast<size_t>(j)]);
            // v = b*i + d*ij with b = d (multiple of i + ij = 2u e'').
            if (v.coord_a() != 0 || v.coord_b() != v.coord_d())
                throw std::domain_error("local_tables_split: dagger form shape");
            t.vdagger_gram(i, j) = u * v.coord_b();
        }
    return t;
}

// The real local model with signature (2,2) (zeta = -1) or (4,0) (zeta = +1):
// Gram diag(1, 1, zeta, zeta), d = +1. Requires -u a rational square.
inline LocalTables local_tables_real(const Rat& u, int zeta) {
    if (zeta != 1 && zeta != -1) throw std::invalid_argument("local_tables_real: zeta = +-1");
    if (!is_square(-u)) throw std::invalid_argument("local_tables_real: -u must be a square");
    Rat u0 = rat_sqrt(-u);
    HermSpace V{u, {Rat(1), Rat(1), Rat(zeta), Rat(zeta)}};
    Trivialization d{QuadElem::scalar(Rat(1), u)};
    WedgeSpace w = build_L(V, d);
    Rat J = wedge_J(w);
    QuatCtx ctx(u, J);

    LocalTables t{w, {}, Mat<Rat>(6, 6), {}, Mat<QuatElem>(3, 3, QuatElem::scalar(Rat(0), ctx)), ctx};
    QuadElem one = QuadElem::scalar(Rat(1), u);
    QuadElem iu = QuadElem::gen(u);
    QuadElem ii = iu / u0;  // the complex unit i = \mathbf{i}/u0, ii^2 = -1
    const int i12 = detail::wedge_index(0, 1), i34 = detail::wedge_index(2, 3);
    const int i13 = detail::wedge_index(0, 2), i24 = detail::wedge_index(1, 3);
    const int i14 = detail::wedge_index(0, 3), i23 = detail::wedge_index(1, 2);
    Rat z(zeta);

    // ~v_1 = v13, ~v_2 = v14, ~v_3 = v12.
    t.btilde = {detail::lincomb(u, {{i13, one}}), detail::lincomb(u, {{i14, one}}),
                detail::lincomb(u, {{i12, one}})};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t.btilde_gram(i, j) = detail::b_form(w, ctx, t.btilde[static_cast<size_t>(i)],
                                                 t.btilde[static_cast<size_t>(j)]);

    // Rescaled basis v'_i = sqrt(2) u0 v_i, which is rational:
    // v'_1 = v13 - zeta v24, v'_2 = -i(v13 + zeta v24), v'_3 = v14 + zeta v23,
    // v'_4 = -i(v14 - zeta v23), v'_5 = v12 + v34, v'_6 = -i(v12 - v34).
    t.vdagger = {detail::lincomb(u, {{i13, one}, {i24, -one * z}}),
                 detail::lincomb(u, {{i13, -ii}, {i24, -ii * z}}),
                 detail::lincomb(u, {{i14, one}, {i23, one * z}}),
                 detail::lincomb(u, {{i14, -ii}, {i23, ii * z}}),
                 detail::lincomb(u, {{i12, one}, {i34, one}}),
                 detail::lincomb(u, {{i12, -ii}, {i34, ii}})};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            QuatElem v = detail::b_form(w, ctx, t.vdagger[static_cast<size_t>(i)],
                                        t.vdagger[static_cast<size_t>(j)]);
            if (v.coord_a() != 0 || v.coord_b() != v.coord_d())
                throw std::domain_error("local_tables_real: dagger form shape");
            t.vdagger_gram(i, j) = u * v.coord_b();
        }
    return t;
}

}  // namespace exiso
