#pragma once

#include "exiso/exactnum.hpp"
#include "exiso/rational.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace exiso {

// A place of Q: the real place or a finite prime.
struct LocalPlace {
    bool real;
    Int p;  // valid when !real

    static LocalPlace reals() { return LocalPlace{true, Int(0)}; }
    static LocalPlace prime(Int q) {
        if (q < 2) throw std::invalid_argument("LocalPlace: p >= 2");
        return LocalPlace{false, std::move(q)};
    }
    bool operator==(const LocalPlace& o) const { return real == o.real && p == o.p; }
    bool operator<(const LocalPlace& o) const {
        if (real != o.real) return real;
        return p < o.p;
    }
    std::string str() const { return real ? "R" : p.str(); }
};

// Eighth root of unity e^{pi i k / 4}, k mod 8.
class EighthRoot {
  public:
    EighthRoot() : e_(0) {}
    explicit EighthRoot(long k) : e_(((k % 8) + 8) % 8) {}
    static EighthRoot one() { return EighthRoot(0); }
    static EighthRoot minus_one() { return EighthRoot(4); }
    static EighthRoot i() { return EighthRoot(2); }
    static EighthRoot from_sign(int s) {
        if (s != 1 && s != -1) throw std::invalid_argument("EighthRoot: sign must be +-1");
        return s == 1 ? one() : minus_one();
    }

    long exponent() const { return e_; }
    EighthRoot operator*(const EighthRoot& o) const { return EighthRoot(e_ + o.e_); }
    EighthRoot operator/(const EighthRoot& o) const { return EighthRoot(e_ - o.e_); }
    EighthRoot inverse() const { return EighthRoot(-e_); }
    EighthRoot pow(long k) const { return EighthRoot(e_ * (((k % 8) + 8) % 8)); }
    bool operator==(const EighthRoot& o) const { return e_ == o.e_; }
    bool operator!=(const EighthRoot& o) const { return e_ != o.e_; }
    bool is_real() const { return e_ % 4 == 0; }
    int real_sign() const {
        if (!is_real()) throw std::domain_error("EighthRoot: not +-1");
        return e_ == 0 ? 1 : -1;
    }
    std::string str() const {
        static const char* names[8] = {"1",  "z8",   "i",  "z8^3", "-1",
                                       "-z8", "-i", "-z8^3"};
        return names[e_];
    }
    friend std::ostream& operator<<(std::ostream& os, const EighthRoot& r) { return os << r.str(); }

  private:
    long e_;
};

namespace detail {

inline int legendre(Int a, const Int& p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) throw std::domain_error("legendre: a divisible by p");
    // Euler criterion by fast exponentiation.
    Int e = (p - 1) / 2, base = a, acc = 1;
    while (e > 0) {
        if (e % 2 == 1) acc = acc * base % p;
        base = base * base % p;
        e /= 2;
    }
    return acc == 1 ? 1 : -1;
}

}  // namespace detail

// Quadratic Hilbert symbol (a, b)_v on Q.
inline int hilbert_symbol(const Rat& a, const Rat& b, const LocalPlace& v) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert_symbol: arguments nonzero");
    if (v.real) return (a < 0 && b < 0) ? -1 : 1;
    const Int& p = v.p;
    long alpha = val_p(a, p), beta = val_p(b, p);
    Rat au = unit_part(a, p), bu = unit_part(b, p);
    if (p != 2) {
        int eps = ((p - 1) / 2) % 2 == 1 ? -1 : 1;  // (-1)^{(p-1)/2}
        int s = 1;
        if ((alpha % 2) && (beta % 2) && eps == -1) s = -s;
        if (beta % 2) s *= detail::legendre(rat_mod(au, p), p);
        if (alpha % 2) s *= detail::legendre(rat_mod(bu, p), p);
        return s;
    }
    // p = 2: (a, b)_2 = (-1)^{eps(au) eps(bu) + alpha w(bu) + beta w(au)}
    auto eps2 = [](const Rat& x) { return ((rat_mod(x, Int(8)) - 1) / 2) % 2; };
    auto omega = [](const Rat& x) {
        Int m = rat_mod(x, Int(8));
        return ((m * m - 1) / 8) % 2;
    };
    Int ex = eps2(au) * eps2(bu) + Int(alpha % 2 ? 1 : 0) * omega(bu) + Int(beta % 2 ? 1 : 0) * omega(au);
    return ex % 2 == 0 ? 1 : -1;
}

// The set of places where (a, b)_v can be nontrivial: the real place, 2, and
// odd primes dividing a or b.
inline std::vector<LocalPlace> symbol_support(const Rat& a, const Rat& b) {
    std::set<Int> primes{Int(2)};
    for (auto& p : prime_support(a)) primes.insert(p);
    for (auto& p : prime_support(b)) primes.insert(p);
    std::vector<LocalPlace> out{LocalPlace::reals()};
    for (auto& p : primes) out.push_back(LocalPlace::prime(p));
    return out;
}

// Absolute Weil index gamma_F(1/2 psi) for the standard additive character
// psi (psi_R(x) = e^{2 pi i x}). Values pinned by the Fresnel sign at the real
// place, conductor-zero lattice sums at odd p, and the product formula at 2.
inline EighthRoot gamma_psi(const LocalPlace& v) {
    if (v.real) return EighthRoot(1);          // e^{pi i/4}
    if (v.p == 2) return EighthRoot(-1);       // e^{-pi i/4}
    return EighthRoot(0);
}

// Normalized Weil index gamma_F(a, 1/2 psi) = gamma(a * 1/2 psi)/gamma(1/2 psi).
// Depends only on the square class of a.  Satisfies
//   gamma(a) gamma(b) / gamma(ab) = (a, b)_v,   gamma(-1) = gamma_psi(v)^{-2}.
inline EighthRoot weil_index(const Rat& a, const LocalPlace& v) {
    if (a == 0) throw std::invalid_argument("weil_index: a nonzero");
    if (v.real) return a > 0 ? EighthRoot(0) : EighthRoot(-2);
    const Int& p = v.p;
    long alpha = val_p(a, p);
    Rat u = unit_part(a, p);
    if (p != 2) {
        if (alpha % 2 == 0) return EighthRoot(0);
        // gamma(p) = (2|p) * (1 if p = 1 mod 4, -i if p = 3 mod 4); then
        // gamma(p u) = gamma(p) (u|p).
        EighthRoot g = (p % 4 == 1) ? EighthRoot(0) : EighthRoot(-2);
        if (detail::legendre(Int(2), p) == -1) g = g * EighthRoot::minus_one();
        if (detail::legendre(rat_mod(u, p), p) == -1) g = g * EighthRoot::minus_one();
        return g;
    }
    // p = 2: table on unit classes mod 8, extended by gamma(2) = 1 and the
    // symbol relation gamma(2u) = gamma(2) gamma(u) (2, u)_2.
    Int m = rat_mod(u, Int(8));
    EighthRoot g;
    if (m == 1) g = EighthRoot(0);
    else if (m == 3) g = EighthRoot(-2);
    else if (m == 5) g = EighthRoot(4);
    else g = EighthRoot(2);  // m == 7, i.e. the class of -1
    if (alpha % 2) {
        Int w = (m * m - 1) / 8;
        if (w % 2 != 0) g = g * EighthRoot::minus_one();
    }
    return g;
}

// Hasse invariant of the diagonal form <a_1, ..., a_n>.
inline int hasse_invariant(const std::vector<Rat>& diag, const LocalPlace& v) {
    int s = 1;
    for (size_t i = 0; i < diag.size(); ++i) {
        if (diag[i] == 0) throw std::invalid_argument("hasse_invariant: entries nonzero");
        for (size_t j = i + 1; j < diag.size(); ++j) s *= hilbert_symbol(diag[i], diag[j], v);
    }
    return s;
}

// Weil index of a nondegenerate diagonal quadratic form w.r.t. 1/2 psi:
// gamma(1/2 psi . q) = gamma_psi^n * prod_i gamma(a_i).
inline EighthRoot weil_index_form(const std::vector<Rat>& diag, const LocalPlace& v) {
    EighthRoot g = gamma_psi(v).pow(static_cast<long>(diag.size()));
    for (auto& a : diag) g = g * weil_index(a, v);
    return g;
}

// Quadratic character of F^x attached to E = F(sqrt(u)): xi_E(t) = (u, t)_v.
inline int xi_E(const Rat& u, const Rat& t, const LocalPlace& v) {
    return hilbert_symbol(u, t, v);
}

// --- Characters chi of E^x with chi|_{F^x} = xi_E -------------------------

struct CharacterSpec {
    enum class Kind { UnramifiedQuadratic, NormClassSymbolic, CircleCharacter };
    Kind kind;
    LocalPlace place;
    Rat u;          // context of E
    long exponent;  // for CircleCharacter (odd)

    static CharacterSpec unramified_quadratic(const Rat& u, const LocalPlace& v) {
        if (v.real) throw std::invalid_argument("unramified quadratic: finite place only");
        return CharacterSpec{Kind::UnramifiedQuadratic, v, u, 0};
    }
    static CharacterSpec norm_class_symbolic(const Rat& u, const LocalPlace& v) {
        return CharacterSpec{Kind::NormClassSymbolic, v, u, 0};
    }
    static CharacterSpec circle(const Rat& u, long n) {
        if (n % 2 == 0) throw std::invalid_argument("circle character: odd exponent required");
        return CharacterSpec{Kind::CircleCharacter, LocalPlace::reals(), u, n};
    }
};

// A character value: either an exact root of unity presented as an element of
// E (covers both eighth roots and circle-character values), or a symbolic
// token recording the unevaluated argument.
struct ChiValue {
    std::optional<QuadElem> value;  // engaged when concrete
    QuadElem symbolic_arg;          // meaningful when !value

    bool concrete() const { return value.has_value(); }
};

inline ChiValue chi_eval(const CharacterSpec& spec, const QuadElem& x) {
    if (x.is_zero()) throw std::invalid_argument("chi_eval: x nonzero");
    switch (spec.kind) {
        case CharacterSpec::Kind::UnramifiedQuadratic: {
            // Inert place: v_E(x) = v_p(N(x)) / 2; chi(x) = (-1)^{v_E(x)}.
            const Int& p = spec.place.p;
            if (detail::legendre(rat_mod(unit_part(spec.u, p), p), p) != -1 || val_p(spec.u, p) % 2 != 0)
                throw std::invalid_argument("chi_eval: place not inert in E");
            long ve = val_p(x.norm(), p);
            if (ve % 2 != 0) throw std::domain_error("chi_eval: inert valuation must be even");
            QuadElem val = QuadElem::scalar(Rat((ve / 2) % 2 == 0 ? 1 : -1), x.u());
            return ChiValue{val, x};
        }
        case CharacterSpec::Kind::CircleCharacter: {
            // chi(z) = (z/|z|)^n; needs N(z) to be a rational square.
            Rat n = x.norm();
            if (n < 0 || !is_square(n))
                return ChiValue{std::nullopt, x};  // outside exact domain: symbolic fallback
            Rat r = rat_sqrt(n);
            QuadElem z = x / r;
            return ChiValue{z.pow(spec.exponent), x};
        }
        case CharacterSpec::Kind::NormClassSymbolic:
        default: {
            // Concrete only on F^x, where chi = xi_E.
            if (x.in_base_field()) {
                int s = xi_E(spec.u, x.a(), spec.place);
                return ChiValue{QuadElem::scalar(Rat(s), x.u()), x};
            }
            return ChiValue{std::nullopt, x};
        }
    }
}

}  // namespace exiso
