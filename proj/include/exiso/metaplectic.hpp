#pragma once

#include "exiso/exactnum.hpp"
#include "exiso/linalg.hpp"
#include "exiso/localinv.hpp"
#include "exiso/rng.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace exiso {

// Symplectic conventions: vectors are rows, elements act on the right, and the
// form matrix is J = [[0, 1_n], [-1_n, 0]]:  <<x, y>> = x J y^T.
// GSp condition: sigma J sigma^T = nu * J.

inline Mat<Rat> symp_J(int n) {
    Mat<Rat> j(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        j(i, n + i) = Rat(1);
        j(n + i, i) = Rat(-1);
    }
    return j;
}

inline Rat symp_pair(const std::vector<Rat>& x, const std::vector<Rat>& y) {
    int n = static_cast<int>(x.size()) / 2;
    Rat acc(0);
    for (int i = 0; i < n; ++i)
        acc += x[static_cast<size_t>(i)] * y[static_cast<size_t>(n + i)] -
               x[static_cast<size_t>(n + i)] * y[static_cast<size_t>(i)];
    return acc;
}

// Similitude factor, or nullopt if not in GSp.
inline std::optional<Rat> gsp_nu(const Mat<Rat>& s) {
    int n = s.rows() / 2;
    Mat<Rat> lhs = s * symp_J(n) * s.transpose();
    Rat nu = lhs(0, n);
    if (nu == 0) return std::nullopt;
    if (lhs == symp_J(n).scaled(nu)) return nu;
    return std::nullopt;
}

inline bool is_sp(const Mat<Rat>& s) {
    auto nu = gsp_nu(s);
    return nu && *nu == 1;
}

// Block constructors (2n x 2n).
inline Mat<Rat> sp_m(const Mat<Rat>& a) {
    int n = a.rows();
    Mat<Rat> s(2 * n, 2 * n);
    s.set_block(0, 0, a);
    s.set_block(n, n, a.inverse().transpose());
    return s;
}
inline Mat<Rat> sp_n(const Mat<Rat>& b) {
    int n = b.rows();
    if (!(b == b.transpose())) throw std::invalid_argument("sp_n: b symmetric");
    Mat<Rat> s = Mat<Rat>::identity(2 * n);
    s.set_block(0, n, b);
    return s;
}
inline Mat<Rat> sp_d(const Rat& nu, int n) {
    Mat<Rat> s = Mat<Rat>::identity(2 * n);
    for (int i = 0; i < n; ++i) s(n + i, n + i) = nu;
    return s;
}
inline Mat<Rat> sp_tau(int n, int j) {
    Mat<Rat> s(2 * n, 2 * n);
    for (int i = 0; i < n - j; ++i) {
        s(i, i) = Rat(1);
        s(n + i, n + i) = Rat(1);
    }
    for (int i = n - j; i < n; ++i) {
        s(i, n + i) = Rat(-1);
        s(n + i, i) = Rat(1);
    }
    return s;
}

// --- Rao data: sigma = p1 tau_j p2 with p_i = m(a_i) n(b_i) ----------------

struct RaoData {
    Rat x;   // det(a1 a2), well defined mod squares
    int j;   // rank of the c block
};

struct RaoDecomposition {
    Mat<Rat> p1, tau, p2;
    RaoData data;
};

// Constructive P tau_j P decomposition. See the symplectic identities: with
// c of rank j one can choose a1 with a1^T c = (0; c') (c' of full row rank),
// then a symmetric b1 supported in the lower-right j x j corner kills the
// bottom rows of the a block, and what remains lies in tau_j P.
inline RaoDecomposition rao_decompose(const Mat<Rat>& sigma) {
    if (!is_sp(sigma)) throw std::invalid_argument("rao_decompose: not symplectic");
    int n = sigma.rows() / 2;
    Mat<Rat> a = sigma.block(0, 0, n, n), c = sigma.block(n, 0, n, n);
    int j = c.rank();

    // Elimination E with E c having zero top n-j rows and independent bottom rows.
    // Build by row-reducing c and moving pivot rows to the bottom.
    Mat<Rat> e = Mat<Rat>::identity(n);
    {
        Mat<Rat> w = c;
        int rk = 0;
        for (int col = 0; col < n && rk < n; ++col) {
            int piv = -1;
            for (int i = rk; i < n; ++i)
                if (w(i, col) != 0) { piv = i; break; }
            if (piv < 0) continue;
            w.swap_rows(rk, piv);
            e.swap_rows(rk, piv);
            for (int i = rk + 1; i < n; ++i) {
                if (w(i, col) == 0) continue;
                Rat f = w(i, col) / w(rk, col);
                w.add_row(i, rk, -f);
                e.add_row(i, rk, -f);
            }
            ++rk;
        }
        // Now rows 0..j-1 of (e c) are the independent ones; move them to the bottom.
        Mat<Rat> perm(n, n);
        for (int i = 0; i < j; ++i) perm(n - j + i, i) = Rat(1);
        for (int i = j; i < n; ++i) perm(i - j, i) = Rat(1);
        e = perm * e;
    }
    // a1 with a1^T = e:
    Mat<Rat> a1 = e.transpose();
    Mat<Rat> s1 = sp_m(a1).inverse() * sigma;  // c-block now (0; c')
    Mat<Rat> c1 = s1.block(n, 0, n, n);
    Mat<Rat> cprime = c1.block(n - j, 0, j, n);
    Mat<Rat> A = s1.block(0, 0, n, n);
    Mat<Rat> Ab = A.block(n - j, 0, j, n);

    // Solve B c' = A_b (B ends up symmetric j x j).
    Mat<Rat> B(j, j);
    {
        // Right inverse of c' via row reduction of [c' | I].
        Mat<Rat> aug(j, n + j);
        aug.set_block(0, 0, cprime);
        for (int i = 0; i < j; ++i) aug(i, n + i) = Rat(1);
        // reduce to row echelon, record pivots
        std::vector<int> pivcol;
        int rk = 0;
        for (int col = 0; col < n && rk < j; ++col) {
            int piv = -1;
            for (int i = rk; i < j; ++i)
                if (aug(i, col) != 0) { piv = i; break; }
            if (piv < 0) continue;
            aug.swap_rows(rk, piv);
            aug.scale_row(rk, Rat(1) / aug(rk, col));
            for (int i = 0; i < j; ++i) {
                if (i == rk || aug(i, col) == 0) continue;
                aug.add_row(i, rk, -aug(i, col));
            }
            pivcol.push_back(col);
            ++rk;
        }
        if (rk != j) throw std::logic_error("rao_decompose: c' rank defect");
        // x-th row of B: solve row * c' = (A_b row): with c' in echelon via aug:
        // express A_b row in terms of rows of c': coefficients = A_b entries at
        // pivot columns, run through the recorded elimination.
        for (int r = 0; r < j; ++r) {
            // Solve y * c' = Ab_r: using aug: the first j columns hold RREF(c'),
            // and columns n.. hold the transform T with T c' = RREF. If
            // Ab_r = z * RREF then y = z * T.
            std::vector<Rat> z(static_cast<size_t>(j), Rat(0));
            std::vector<Rat> rem(static_cast<size_t>(n));
            for (int q = 0; q < n; ++q) rem[static_cast<size_t>(q)] = Ab(r, q);
            for (int t = 0; t < j; ++t) {
                Rat coef = rem[static_cast<size_t>(pivcol[static_cast<size_t>(t)])];
                z[static_cast<size_t>(t)] = coef;
                if (coef == 0) continue;
                for (int q = 0; q < n; ++q) rem[static_cast<size_t>(q)] -= coef * aug(t, q);
            }
            for (auto& x : rem)
                if (x != 0) throw std::logic_error("rao_decompose: A_b outside rowspan(c')");
            for (int t = 0; t < j; ++t) {
                Rat acc(0);
                for (int q = 0; q < j; ++q) acc += z[static_cast<size_t>(q)] * aug(q, n + t);
                B(r, t) = acc;
            }
        }
    }
    if (!(B == B.transpose())) throw std::logic_error("rao_decompose: B not symmetric");
    Mat<Rat> b1(n, n);
    b1.set_block(n - j, n - j, B);
    Mat<Rat> p1 = sp_m(a1) * sp_n(b1);
    Mat<Rat> rho = p1.inverse() * sigma;  // in tau_j P
    // rho = tau_j m(a2) n(b2): a-block = (top of a2; 0), c-block = (0; bottom of a2).
    Mat<Rat> a2(n, n);
    a2.set_block(0, 0, rho.block(0, 0, n - j, n));
    a2.set_block(n - j, 0, rho.block(2 * n - j, 0, j, n));
    Mat<Rat> rest = (sp_tau(n, j) * sp_m(a2)).inverse() * rho;  // should be n(b2)
    Mat<Rat> b2 = rest.block(0, n, n, n);
    if (!(rest == sp_n(b2))) throw std::logic_error("rao_decompose: residual not unipotent");
    Mat<Rat> p2 = sp_m(a2) * sp_n(b2);

    RaoDecomposition out{p1, sp_tau(n, j), p2, RaoData{a1.det() * a2.det(), j}};
    if (!(out.p1 * out.tau * out.p2 == sigma)) throw std::logic_error("rao_decompose: product check");
    return out;
}

// --- Lagrangians and the Leray invariant ------------------------------------

// A Lagrangian subspace, stored as a full-row-rank matrix of spanning rows.
struct Lagrangian {
    Mat<Rat> rows;

    static Lagrangian standard_Y(int n) {
        Mat<Rat> m(n, 2 * n);
        for (int i = 0; i < n; ++i) m(i, n + i) = Rat(1);
        return Lagrangian{m};
    }
    static Lagrangian standard_X(int n) {
        Mat<Rat> m(n, 2 * n);
        for (int i = 0; i < n; ++i) m(i, i) = Rat(1);
        return Lagrangian{m};
    }
    Lagrangian acted(const Mat<Rat>& sigma) const { return Lagrangian{rows * sigma}; }

    bool valid() const {
        int n = rows.cols() / 2;
        if (rows.rows() != n || rows.rank() != n) return false;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                std::vector<Rat> x(static_cast<size_t>(2 * n)), y(static_cast<size_t>(2 * n));
                for (int k = 0; k < 2 * n; ++k) {
                    x[static_cast<size_t>(k)] = rows(i, k);
                    y[static_cast<size_t>(k)] = rows(j, k);
                }
                if (symp_pair(x, y) != 0) return false;
            }
        return true;
    }
};

// Diagonalize a symmetric matrix by congruence; returns the nonzero diagonal
// entries (the radical is split off).
inline std::vector<Rat> diagonalize_symmetric(Mat<Rat> q) {
    int n = q.rows();
    std::vector<Rat> diag;
    std::vector<bool> done(static_cast<size_t>(n), false);
    for (int step = 0; step < n; ++step) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (!done[static_cast<size_t>(i)] && q(i, i) != 0) { piv = i; break; }
        if (piv < 0) {
            // look for an off-diagonal entry between two not-done indices
            int a = -1, b = -1;
            for (int i = 0; i < n && a < 0; ++i)
                for (int j = i + 1; j < n && a < 0; ++j)
                    if (!done[static_cast<size_t>(i)] && !done[static_cast<size_t>(j)] && q(i, j) != 0) {
                        a = i; b = j;
                    }
            if (a < 0) break;  // all that remains is radical
            // row/col a += row/col b creates a nonzero diagonal entry at a
            for (int k = 0; k < n; ++k) q(a, k) += q(b, k);
            for (int k = 0; k < n; ++k) q(k, a) += q(k, b);
            piv = a;
        }
        Rat d = q(piv, piv);
        diag.push_back(d);
        done[static_cast<size_t>(piv)] = true;
        for (int i = 0; i < n; ++i) {
            if (i == piv || done[static_cast<size_t>(i)]) continue;
            Rat f = q(i, piv) / d;
            if (f == 0) continue;
            for (int k = 0; k < n; ++k) q(i, k) -= f * q(piv, k);
            for (int k = 0; k < n; ++k) q(k, i) -= f * q(k, piv);
        }
    }
    return diag;
}

// The Leray quadratic form of a triple of Lagrangians: Q on
// T = {(x1,x2,x3) in L1 x L2 x L3 : x1+x2+x3 = 0}, Q = <<x1, x2>>,
// returned as its list of nonzero diagonal entries.
inline std::vector<Rat> leray_form(const Lagrangian& L1, const Lagrangian& L2,
                                   const Lagrangian& L3) {
    int twon = L1.rows.cols();
    int k1 = L1.rows.rows(), k2 = L2.rows.rows(), k3 = L3.rows.rows();
    Mat<Rat> stacked(k1 + k2 + k3, twon);
    stacked.set_block(0, 0, L1.rows);
    stacked.set_block(k1, 0, L2.rows);
    stacked.set_block(k1 + k2, 0, L3.rows);
    // Kernel of v -> v * stacked ... we need rows v with v * stacked = 0:
    // kernel of stacked^T acting on columns; compute nullspace of stacked^T.
    Mat<Rat> mt = stacked.transpose();  // twon x (k1+k2+k3)
    // Nullspace via RREF of mt: solve mt * v^T = 0.
    int rows = mt.rows(), cols = mt.cols();
    Mat<Rat> r = mt;
    std::vector<int> pivot_of_col(static_cast<size_t>(cols), -1);
    int rk = 0;
    for (int col = 0; col < cols && rk < rows; ++col) {
        int piv = -1;
        for (int i = rk; i < rows; ++i)
            if (r(i, col) != 0) { piv = i; break; }
        if (piv < 0) continue;
        r.swap_rows(rk, piv);
        r.scale_row(rk, Rat(1) / r(rk, col));
        for (int i = 0; i < rows; ++i) {
            if (i == rk || r(i, col) == 0) continue;
            r.add_row(i, rk, -r(i, col));
        }
        pivot_of_col[static_cast<size_t>(col)] = rk;
        ++rk;
    }
    std::vector<std::vector<Rat>> kernel;
    for (int col = 0; col < cols; ++col) {
        if (pivot_of_col[static_cast<size_t>(col)] >= 0) continue;
        std::vector<Rat> v(static_cast<size_t>(cols), Rat(0));
        v[static_cast<size_t>(col)] = Rat(1);
        for (int c2 = 0; c2 < cols; ++c2) {
            int pr = pivot_of_col[static_cast<size_t>(c2)];
            if (pr >= 0) v[static_cast<size_t>(c2)] = -r(pr, col);
        }
        kernel.push_back(v);
    }
    int dimT = static_cast<int>(kernel.size());
    // Q(v) = <<x1, x2>> where x1 = (first k1 coords) * L1, x2 = (next k2) * L2.
    auto part = [&](const std::vector<Rat>& v, int off, int cnt, const Mat<Rat>& basis) {
        std::vector<Rat> x(static_cast<size_t>(twon), Rat(0));
        for (int i = 0; i < cnt; ++i)
            for (int c = 0; c < twon; ++c)
                x[static_cast<size_t>(c)] += v[static_cast<size_t>(off + i)] * basis(i, c);
        return x;
    };
    Mat<Rat> gramQ(dimT, dimT);
    for (int i = 0; i < dimT; ++i)
        for (int j = i; j < dimT; ++j) {
            auto x1i = part(kernel[static_cast<size_t>(i)], 0, k1, L1.rows);
            auto x2i = part(kernel[static_cast<size_t>(i)], k1, k2, L2.rows);
            auto x1j = part(kernel[static_cast<size_t>(j)], 0, k1, L1.rows);
            auto x2j = part(kernel[static_cast<size_t>(j)], k1, k2, L2.rows);
            Rat bij = (symp_pair(x1i, x2j) + symp_pair(x1j, x2i)) / 2;
            gramQ(i, j) = bij;
            gramQ(j, i) = bij;
        }
    return diagonalize_symmetric(gramQ);
}

// gamma_F(1/2 psi . q(L1, L2, L3)).
inline EighthRoot leray_gamma(const Lagrangian& L1, const Lagrangian& L2, const Lagrangian& L3,
                              const LocalPlace& v) {
    return weil_index_form(leray_form(L1, L2, L3), v);
}

// --- The metaplectic 2-cocycle ----------------------------------------------

// Rao cocycle relative to a Lagrangian Y:
//   z_Y(s1, s2) = gamma( 1/2 psi . q(Y, Y (s1 s2)^{-1}, Y s1^{-1}) ).
// The triple ordering is pinned by the normalization
//   z(tau_n, n(b) tau_n) = gamma_psi^n gamma(det b) h(b).
inline EighthRoot rao_cocycle_wrt(const Lagrangian& Y, const Mat<Rat>& s1, const Mat<Rat>& s2,
                                  const LocalPlace& v) {
    Lagrangian l2 = Y.acted((s1 * s2).inverse());
    Lagrangian l3 = Y.acted(s1.inverse());
    return leray_gamma(Y, l2, l3, v);
}

inline EighthRoot rao_cocycle(const Mat<Rat>& s1, const Mat<Rat>& s2, const LocalPlace& v) {
    int n = s1.rows() / 2;
    return rao_cocycle_wrt(Lagrangian::standard_Y(n), s1, s2, v);
}

// v(sigma, nu) = (x(sigma), nu)_F gamma(nu)^{-j(sigma)}.
inline EighthRoot v_factor(const Mat<Rat>& sigma, const Rat& nu, const LocalPlace& v) {
    RaoDecomposition d = rao_decompose(sigma);
    EighthRoot out = EighthRoot::from_sign(hilbert_symbol(d.data.x, nu, v));
    return out * weil_index(nu, v).pow(-d.data.j);
}

// Extension of z to GSp x GSp on pairs with nu(s1) nu(s2) = 1:
//   z(s1, s2) = z(s1 d(nu)^{-1}, d(nu) s2) * v(s2 d(nu), nu),  nu = nu(s1).
inline EighthRoot gsp_cocycle(const Mat<Rat>& s1, const Mat<Rat>& s2, const LocalPlace& v) {
    auto nu1 = gsp_nu(s1), nu2 = gsp_nu(s2);
    if (!nu1 || !nu2 || *nu1 * *nu2 != 1)
        throw std::invalid_argument("gsp_cocycle: need nu(s1) nu(s2) = 1");
    int n = s1.rows() / 2;
    Mat<Rat> dn = sp_d(*nu1, n);
    return rao_cocycle(s1 * dn.inverse(), dn * s2, v) * v_factor(s2 * dn, *nu1, v);
}

// Same, relative to an arbitrary polarization given by an adapted symplectic
// basis theta (rows: X-basis then Y-basis, <<x_i, y_j>> = delta_ij): conjugate
// into standard coordinates.
inline EighthRoot gsp_cocycle_adapted(const Mat<Rat>& theta, const Mat<Rat>& s1,
                                      const Mat<Rat>& s2, const LocalPlace& v) {
    Mat<Rat> ti = theta.inverse();
    return gsp_cocycle(theta * s1 * ti, theta * s2 * ti, v);
}

// --- Doubling ----------------------------------------------------------------

// Sp(V) x Sp(V) -> Sp(V + (-V)) in the doubled basis
// ((e,0),(0,e),(e*,0),(0,-e*)) where (e, e*) is the standard basis of V.
inline Mat<Rat> sp_double(const Mat<Rat>& s1, const Mat<Rat>& s2) {
    int n = s1.rows() / 2;
    auto idx = [&](int copy, int half, int i) { return half * 2 * n + copy * n + i; };
    Mat<Rat> out(4 * n, 4 * n);
    for (int copy = 0; copy < 2; ++copy) {
        const Mat<Rat>& s = copy == 0 ? s1 : s2;
        for (int half = 0; half < 2; ++half)
            for (int i = 0; i < n; ++i) {
                // basis vector: copy-th component, e_i (half=0) or +-e*_i (half=1)
                for (int h2 = 0; h2 < 2; ++h2)
                    for (int k = 0; k < n; ++k) {
                        Rat entry = s(half * n + i, h2 * n + k);
                        if (entry == 0) continue;
                        Rat scale(1);
                        if (half == 1 && copy == 1) scale *= -1;  // source is -e*
                        if (h2 == 1 && copy == 1) scale *= -1;    // target -e* basis
                        out(idx(copy, half, i), idx(copy, h2, k)) = entry * scale;
                    }
            }
    }
    return out;
}

// sigma_0 interchanging (X++, Y++) with (V-nabla, V-triangle); the element
// with rows [ (e,-e)/2 ; (e*,-e*)/2 ; (e*,e*) ; (-e,-e) ] in doubled coords.
inline Mat<Rat> sp_sigma0(int n) {
    Mat<Rat> s(4 * n, 4 * n);
    auto put = [&](int row, int col, const Rat& x) { s(row, col) = x; };
    for (int i = 0; i < n; ++i) {
        // row i: (e_i, -e_i)/2 = 1/2 (e_i,0) - 1/2 (0,e_i)
        put(i, i, Rat(1, 2));
        put(i, n + i, Rat(-1, 2));
        // row n+i: (e*_i, -e*_i)/2 = 1/2 (e*,0) + 1/2 (0,-e*)
        put(n + i, 2 * n + i, Rat(1, 2));
        put(n + i, 3 * n + i, Rat(1, 2));
        // row 2n+i: (e*_i, e*_i) = (e*,0) - (0,-e*)
        put(2 * n + i, 2 * n + i, Rat(1));
        put(2 * n + i, 3 * n + i, Rat(-1));
        // row 3n+i: (-e_i, -e_i)
        put(3 * n + i, i, Rat(-1));
        put(3 * n + i, n + i, Rat(-1));
    }
    return s;
}

// Random Sp element as a short word in m(a), n(b), tau_j with small entries.
inline Mat<Rat> random_sp(Rng& rng, int n, int factors = 3) {
    Mat<Rat> acc = Mat<Rat>::identity(2 * n);
    for (int f = 0; f < factors; ++f) {
        switch (rng.uniform(0, 2)) {
            case 0: {
                // random invertible a with small entries
                Mat<Rat> a(n, n);
                do {
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) a(i, j) = Rat(rng.uniform(-2, 2));
                } while (a.det() == 0);
                acc = acc * sp_m(a);
                break;
            }
            case 1: {
                Mat<Rat> b(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        b(i, j) = rng.small_rat(2, 2);
                        b(j, i) = b(i, j);
                    }
                acc = acc * sp_n(b);
                break;
            }
            default:
                acc = acc * sp_tau(n, rng.uniform(0, n));
        }
    }
    return acc;
}

}  // namespace exiso
