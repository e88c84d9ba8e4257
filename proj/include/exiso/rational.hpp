#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace exiso {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline bool is_zero(const Rat& r) { return r == 0; }

inline int sign(const Rat& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

inline Rat rat_pow(const Rat& r, long e) {
    if (e == 0) return Rat(1);
    if (r == 0 && e < 0) throw std::domain_error("rat_pow: zero to negative power");
    Rat base = e > 0 ? r : Rat(1) / r;
    unsigned long k = static_cast<unsigned long>(e > 0 ? e : -e);
    Rat acc(1);
    while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

inline Int int_sqrt(const Int& n) {
    if (n < 0) throw std::domain_error("int_sqrt of negative");
    return boost::multiprecision::sqrt(n);
}

// Exact test for r being the square of a rational.
inline bool is_square(const Rat& r) {
    if (r < 0) return false;
    Int n = num(r), d = den(r);
    Int sn = int_sqrt(n), sd = int_sqrt(d);
    return sn * sn == n && sd * sd == d;
}

inline Rat rat_sqrt(const Rat& r) {
    if (!is_square(r)) throw std::domain_error("rat_sqrt: not a rational square");
    return Rat(int_sqrt(num(r)), int_sqrt(den(r)));
}

// p-adic valuation of a nonzero rational.
inline long val_p(const Rat& r, const Int& p) {
    if (r == 0) throw std::domain_error("val_p of zero");
    long v = 0;
    Int n = num(r);
    while (n % p == 0) { n /= p; ++v; }
    Int d = den(r);
    while (d % p == 0) { d /= p; --v; }
    return v;
}

// Unit part of r at p: r / p^{val_p(r)}.
inline Rat unit_part(const Rat& r, const Int& p) {
    long v = val_p(r, p);
    Rat q(p);
    return r / rat_pow(q, v);
}

// r mod m for a rational r whose denominator is prime to m; result in [0, m).
inline Int rat_mod(const Rat& r, const Int& m) {
    Int n = num(r) % m, d = den(r) % m;
    if (n < 0) n += m;
    if (d < 0) d += m;
    // modular inverse of d
    Int t(0), newt(1), rr(m), newr(d);
    while (newr != 0) {
        Int q = rr / newr;
        Int tmp = t - q * newt; t = newt; newt = tmp;
        tmp = rr - q * newr; rr = newr; newr = tmp;
    }
    if (rr != 1) throw std::domain_error("rat_mod: denominator not invertible mod m");
    if (t < 0) t += m;
    return (n * t) % m;
}

// Odd prime factors of the numerator and denominator (trial division; desk scale).
inline std::vector<Int> prime_support(const Rat& r) {
    std::vector<Int> out;
    Int n = num(r) * den(r);
    if (n < 0) n = -n;
    for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// True if a/b is a square in Q (same square class).
inline bool same_square_class(const Rat& a, const Rat& b) {
    return is_square(a / b);
}

}  // namespace exiso
