#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace bigerm {

using Int = mpz_class;
using Rat = mpq_class;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Canonical rational p/q with q > 0, gcd(p,q) = 1.
inline Rat rat(long p, long q = 1) {
    if (q == 0) throw Error("rational with zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

inline Rat rat(const Int& p, const Int& q) {
    if (q == 0) throw Error("rational with zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

inline Rat pow_rat(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw Error("zero to negative power");
        return Rat(0);
    }
    Rat p;
    unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(p.get_num_mpz_t(), base.get_num_mpz_t(), a);
    mpz_pow_ui(p.get_den_mpz_t(), base.get_den_mpz_t(), a);
    p.canonicalize();
    if (e < 0) p = 1 / p;
    return p;
}

// Exact n-th root of a rational if it exists in Q (sign-aware; n >= 1).
inline std::optional<Rat> nth_root_rat(const Rat& x, long n) {
    if (n <= 0) throw Error("nth_root_rat: n must be positive");
    if (n == 1) return x;
    if (x == 0) return Rat(0);
    bool neg = x < 0;
    if (neg && n % 2 == 0) return std::nullopt;
    Int num = abs(x.get_num());
    Int den = x.get_den();
    Int rn, rd;
    if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(n))) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(n))) return std::nullopt;
    Rat r = rat(neg ? Int(-rn) : rn, rd);
    return r;
}

// Canonical text form: "p" when integral, else "p/q".
inline std::string rat_to_string(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace bigerm
