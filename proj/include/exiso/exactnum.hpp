#pragma once

#include "exiso/linalg.hpp"
#include "exiso/rational.hpp"
#include "exiso/rng.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace exiso {

// Element a + b*i of the quadratic algebra E = F + F*i, i^2 = u.
// The context u travels with the element; mixing contexts throws.
class QuadElem {
  public:
    QuadElem() : a_(0), b_(0), u_(0) {}
    QuadElem(Rat a, Rat b, Rat u) : a_(std::move(a)), b_(std::move(b)), u_(std::move(u)) {
        if (u_ == 0) throw std::invalid_argument("QuadElem: u must be nonzero");
    }
    static QuadElem scalar(const Rat& a, const Rat& u) { return QuadElem(a, Rat(0), u); }
    static QuadElem gen(const Rat& u) { return QuadElem(Rat(0), Rat(1), u); }  // the element i

    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }
    const Rat& u() const { return u_; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool in_base_field() const { return b_ == 0; }
    bool split_context() const { return is_square(u_); }  // E = F x F, not a field

    QuadElem conj() const { return raw(a_, -b_, u_); }        // the automorphism rho
    Rat norm() const { return a_ * a_ - b_ * b_ * u_; }       // N(x) = x * x^rho
    Rat trace() const { return 2 * a_; }

    QuadElem operator+(const QuadElem& o) const {
        chk(o);
        return raw(a_ + o.a_, b_ + o.b_, merged(o));
    }
    QuadElem operator-(const QuadElem& o) const {
        chk(o);
        return raw(a_ - o.a_, b_ - o.b_, merged(o));
    }
    QuadElem operator-() const { return raw(-a_, -b_, u_); }
    QuadElem operator*(const QuadElem& o) const {
        chk(o);
        Rat u = merged(o);
        return raw(a_ * o.a_ + b_ * o.b_ * u, a_ * o.b_ + b_ * o.a_, u);
    }
    QuadElem inverse() const {
        Rat n = norm();
        if (n == 0) throw std::domain_error("QuadElem: not invertible (zero norm)");
        return raw(a_ / n, -b_ / n, u_);
    }
    QuadElem operator/(const QuadElem& o) const { return *this * o.inverse(); }

    QuadElem operator*(const Rat& s) const { return raw(a_ * s, b_ * s, u_); }
    QuadElem operator/(const Rat& s) const { return raw(a_ / s, b_ / s, u_); }

    QuadElem pow(long e) const {
        QuadElem base = e >= 0 ? *this : inverse();
        long k = e >= 0 ? e : -e;
        QuadElem acc = raw(Rat(1), Rat(0), u_);
        while (k) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    // Equality treats a context-free rational literal as equal to the same
    // scalar in any context.
    bool operator==(const QuadElem& o) const {
        if (a_ != o.a_ || b_ != o.b_) return false;
        return u_ == o.u_ || u_ == 0 || o.u_ == 0 || b_ == 0;
    }
    bool operator!=(const QuadElem& o) const { return !(*this == o); }

    // Needed so Mat<QuadElem> compiles: T(0)/T(1) literals carry u_ = 0 and
    // fuse with any context on first arithmetic contact.
    QuadElem(int v) : a_(v), b_(0), u_(0) {}
    QuadElem& operator+=(const QuadElem& o) { *this = *this + o; return *this; }

    friend std::ostream& operator<<(std::ostream& os, const QuadElem& x) {
        return os << "(" << x.a_ << "+" << x.b_ << "*i)";
    }

  private:
    static QuadElem raw(Rat a, Rat b, Rat u) {
        QuadElem q(0);
        q.a_ = std::move(a);
        q.b_ = std::move(b);
        q.u_ = std::move(u);
        return q;
    }
    Rat merged(const QuadElem& o) const { return u_ != 0 ? u_ : o.u_; }
    void chk(const QuadElem& o) const {
        if (u_ != o.u_ && u_ != 0 && o.u_ != 0)
            throw std::invalid_argument("QuadElem: context mismatch");
    }
    Rat a_, b_, u_;
};

// Quaternion context (u, J / F): B = E + E*j, i^2 = u, j^2 = J, i*j = -j*i.
struct QuatCtx {
    Rat u, J;
    QuatCtx(Rat u_, Rat J_) : u(std::move(u_)), J(std::move(J_)) {
        if (u == 0 || J == 0) throw std::invalid_argument("QuatCtx: u, J nonzero");
    }
    bool operator==(const QuatCtx& o) const { return u == o.u && J == o.J; }
};

// Element x + j*y with x, y in E. pr(x + j*y) = x.
class QuatElem {
  public:
    QuatElem(QuadElem x, QuadElem y, QuatCtx ctx)
        : x_(std::move(x)), y_(std::move(y)), ctx_(std::move(ctx)) {}

    static QuatElem scalar(const Rat& a, const QuatCtx& c) {
        return QuatElem(QuadElem::scalar(a, c.u), QuadElem::scalar(Rat(0), c.u), c);
    }
    static QuatElem from_E(const QuadElem& x, const QuatCtx& c) {
        return QuatElem(x, QuadElem::scalar(Rat(0), c.u), c);
    }
    static QuatElem one(const QuatCtx& c) { return scalar(Rat(1), c); }
    static QuatElem gen_i(const QuatCtx& c) { return from_E(QuadElem::gen(c.u), c); }
    static QuatElem gen_j(const QuatCtx& c) {
        return QuatElem(QuadElem::scalar(Rat(0), c.u), QuadElem::scalar(Rat(1), c.u), c);
    }
    // a + b*i + c*j + d*i*j; note i*j = j*(-i), so the j-coordinate is c - d*i.
    static QuatElem from_coords(const Rat& a, const Rat& b, const Rat& c, const Rat& d,
                                const QuatCtx& ctx) {
        return QuatElem(QuadElem(a, b, ctx.u), QuadElem(c, -d, ctx.u), ctx);
    }

    const QuadElem& x() const { return x_; }  // pr(q)
    const QuadElem& y() const { return y_; }
    const QuatCtx& ctx() const { return ctx_; }

    Rat coord_a() const { return x_.a(); }
    Rat coord_b() const { return x_.b(); }
    Rat coord_c() const { return y_.a(); }
    Rat coord_d() const { return -y_.b(); }

    bool is_zero() const { return x_.is_zero() && y_.is_zero(); }

    QuatElem operator+(const QuatElem& o) const { chk(o); return QuatElem(x_ + o.x_, y_ + o.y_, ctx_); }
    QuatElem operator-(const QuatElem& o) const { chk(o); return QuatElem(x_ - o.x_, y_ - o.y_, ctx_); }
    QuatElem operator-() const { return QuatElem(-x_, -y_, ctx_); }

    // (x1 + j y1)(x2 + j y2) = (x1 x2 + J y1^rho y2) + j (x1^rho y2 + y1 x2)
    QuatElem operator*(const QuatElem& o) const {
        chk(o);
        QuadElem J = QuadElem::scalar(ctx_.J, ctx_.u);
        return QuatElem(x_ * o.x_ + J * y_.conj() * o.y_, x_.conj() * o.y_ + y_ * o.x_, ctx_);
    }

    QuatElem operator*(const QuadElem& s) const {  // right multiplication by s in E
        return *this * from_E(s, ctx_);
    }
    QuatElem operator*(const Rat& s) const {
        return QuatElem(x_ * s, y_ * s, ctx_);
    }

    // Main involution: q^* with (pq)^* = q^* p^*, q q^* = nu(q).
    QuatElem involution() const { return QuatElem(x_.conj(), -y_, ctx_); }

    Rat nu() const {  // reduced norm
        return x_.norm() - ctx_.J * y_.norm();
    }
    Rat trace() const { return x_.trace(); }

    QuatElem inverse() const {
        Rat n = nu();
        if (n == 0) throw std::domain_error("QuatElem: not invertible");
        QuatElem c = involution();
        return QuatElem(c.x() / n, c.y() / n, ctx_);
    }

    bool operator==(const QuatElem& o) const { return x_ == o.x_ && y_ == o.y_ && ctx_ == o.ctx_; }
    bool operator!=(const QuatElem& o) const { return !(*this == o); }

    friend std::ostream& operator<<(std::ostream& os, const QuatElem& q) {
        return os << q.coord_a() << " + " << q.coord_b() << "*i + " << q.coord_c() << "*j + "
                  << q.coord_d() << "*ij";
    }

  private:
    void chk(const QuatElem& o) const {
        if (!(ctx_ == o.ctx_)) throw std::invalid_argument("QuatElem: context mismatch");
    }
    QuadElem x_, y_;
    QuatCtx ctx_;
};

// Norm-one element c + s*i of E, kept with the exact relation c^2 - s^2 u = 1.
class CirclePoint {
  public:
    CirclePoint(Rat c, Rat s, Rat u) : z_(std::move(c), std::move(s), std::move(u)) {
        if (z_.norm() != 1) throw std::invalid_argument("CirclePoint: c^2 - s^2 u != 1");
    }
    explicit CirclePoint(const QuadElem& z) : z_(z) {
        if (z_.norm() != 1) throw std::invalid_argument("CirclePoint: norm != 1");
    }
    static CirclePoint one(const Rat& u) { return CirclePoint(Rat(1), Rat(0), u); }
    // Hilbert-90 parametrization (1 + t i)/(1 + t i)^rho.
    static CirclePoint from_parameter(const Rat& t, const Rat& u) {
        Rat n = 1 - t * t * u;
        if (n == 0) throw std::invalid_argument("CirclePoint: parameter on the light cone");
        return CirclePoint(QuadElem(1 + t * t * u, 2 * t, u) / n);
    }
    static CirclePoint random(Rng& rng, const Rat& u) {
        for (;;) {
            Rat t = rng.small_rat(4, 3);
            if (1 - t * t * u == 0) continue;
            return from_parameter(t, u);
        }
    }

    const Rat& c() const { return z_.a(); }
    const Rat& s() const { return z_.b(); }
    const QuadElem& value() const { return z_; }

    CirclePoint operator*(const CirclePoint& o) const { return CirclePoint(z_ * o.z_); }
    CirclePoint inverse() const { return CirclePoint(z_.conj()); }
    CirclePoint pow(long e) const { return CirclePoint(z_.pow(e)); }
    bool operator==(const CirclePoint& o) const { return z_ == o.z_; }

  private:
    QuadElem z_;
};

// quat_mul as a free function mirroring the operation name.
inline QuatElem quat_mul(const QuatElem& p, const QuatElem& q) { return p * q; }

// Given alpha in E^x with N(alpha) = 1, produce beta with beta/beta^rho = alpha.
// Deterministic choice: beta = 1 + alpha, except beta = i for alpha = -1.
inline QuadElem hilbert90_beta(const QuadElem& alpha) {
    if (alpha.split_context()) throw std::invalid_argument("hilbert90_beta: E must be a field");
    if (alpha.norm() != 1) throw std::invalid_argument("hilbert90_beta: norm != 1");
    QuadElem one = QuadElem::scalar(Rat(1), alpha.u());
    if (alpha == -one) return QuadElem::gen(alpha.u());
    return one + alpha;
}

// The splitting B -> M_2(F) for J = k^2 - l^2 u:
//   i(a + b i + c j + d ij) = [[a, b], [b u, a]] + [[c, d], [d u, c]] * [[k, -l], [l u, -k]].
inline Mat<Rat> split_matrix_embed(const QuatElem& q, const Rat& k, const Rat& l) {
    const Rat& u = q.ctx().u;
    if (k * k - l * l * u != q.ctx().J)
        throw std::invalid_argument("split_matrix_embed: k^2 - l^2 u != J");
    Rat a = q.coord_a(), b = q.coord_b(), c = q.coord_c(), d = q.coord_d();
    Mat<Rat> m(2, 2);
    m(0, 0) = a + c * k + d * l * u;
    m(0, 1) = b - c * l - d * k;
    m(1, 0) = (b + c * l + d * k) * u;
    m(1, 1) = a - c * k - d * l * u;
    return m;
}

// Convenience form for J = t^2 (so k = t, l = 0), the square-uniformizer case.
inline Mat<Rat> split_matrix_embed(const QuatElem& q, const Rat& t) {
    return split_matrix_embed(q, t, Rat(0));
}

// Split-case idempotents for J = k^2 - l^2 u; images are the matrix units.
struct SplitIdempotents {
    QuatElem e, ep, epp, estar;
};
inline SplitIdempotents split_idempotents(const QuatCtx& c, const Rat& k, const Rat& l) {
    const Rat& u = c.u;
    const Rat& J = c.J;
    if (k * k - l * l * u != J) throw std::invalid_argument("split_idempotents: k^2 - l^2 u != J");
    auto mk = [&](Rat a, Rat b, Rat cc, Rat d) { return QuatElem::from_coords(a, b, cc, d, c); };
    SplitIdempotents s{
        mk(Rat(1, 2), Rat(0), k / (2 * J), -l / (2 * J)),
        mk(Rat(0), Rat(1, 2), l * u / (2 * J), -k / (2 * J)),
        mk(Rat(0), Rat(1) / (2 * u), -l / (2 * J), k / (2 * u * J)),
        mk(Rat(1, 2), Rat(0), -k / (2 * J), l / (2 * J))};
    return s;
}

// Random invertible elements for property tests.
inline QuadElem random_quad(Rng& rng, const Rat& u, long maxnum = 4) {
    return QuadElem(rng.small_rat(maxnum), rng.small_rat(maxnum), u);
}
inline QuadElem random_quad_unit(Rng& rng, const Rat& u, long maxnum = 4) {
    for (;;) {
        QuadElem x = random_quad(rng, u, maxnum);
        if (x.norm() != 0) return x;
    }
}
inline QuatElem random_quat(Rng& rng, const QuatCtx& c, long maxnum = 3) {
    return QuatElem(random_quad(rng, c.u, maxnum), random_quad(rng, c.u, maxnum), c);
}
inline QuatElem random_quat_unit(Rng& rng, const QuatCtx& c, long maxnum = 3) {
    for (;;) {
        QuatElem q = random_quat(rng, c, maxnum);
        if (q.nu() != 0) return q;
    }
}
// Random element of reduced norm 1: y^{-*} y.
inline QuatElem random_norm_one(Rng& rng, const QuatCtx& c, long maxnum = 2) {
    QuatElem y = random_quat_unit(rng, c, maxnum);
    return y.involution().inverse() * y;
}

}  // namespace exiso
