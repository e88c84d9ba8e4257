#pragma once

#include "exiso/rational.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace exiso {

// Deterministic stream with cheap named sub-streams, so every "random element"
// constructor takes the stream explicitly and reruns identically for a fixed
// seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    Rng fork(const std::string& label) const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t x) {
            h ^= x;
            h *= 1099511628211ull;
        };
        mix(seed_);
        for (char c : label) mix(static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
        return Rng(h);
    }

    std::uint64_t bits() { return eng_(); }

    long uniform(long lo, long hi) {  // inclusive
        std::uniform_int_distribution<long> d(lo, hi);
        return d(eng_);
    }

    bool coin() { return uniform(0, 1) == 1; }

    Rat small_rat(long maxnum = 5, long maxden = 3) {
        long n = uniform(-maxnum, maxnum);
        long d = uniform(1, maxden);
        return Rat(n, d);
    }

    Rat nonzero_rat(long maxnum = 5, long maxden = 3) {
        Rat r;
        do { r = small_rat(maxnum, maxden); } while (r == 0);
        return r;
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace exiso
