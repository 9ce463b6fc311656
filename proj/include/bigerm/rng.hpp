#pragma once

#include <cstdint>
#include <vector>

#include "bigerm/rational.hpp"

namespace bigerm {

// Deterministic PRNG (splitmix64). std::uniform_int_distribution is
// implementation-defined, which would break byte-identical output across
// toolchains; this keeps seeded runs reproducible everywhere.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    long range(long lo, long hi) {  // inclusive
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool chance(unsigned num, unsigned den) { return below(den) < num; }

    // Small nonzero rational with |numerator| <= nmax, denominator in [1, dmax].
    Rat small_nonzero(long nmax = 3, long dmax = 3) {
        long p = 0;
        while (p == 0) p = range(-nmax, nmax);
        long q = range(1, dmax);
        return rat(p, q);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

   private:
    std::uint64_t state_;
};

}  // namespace bigerm
