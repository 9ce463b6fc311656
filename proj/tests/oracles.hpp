#pragma once

// Brute-force oracles used by the unit and acceptance suites. These go
// through the series layer only: random rational combinations of monomial
// generators, evaluated directly, never through the saturation machinery
// they are checking.

#include <set>

#include "bigerm/rng.hpp"
#include "bigerm/valuesets.hpp"

namespace bigerm::oracles {

enum class Kind { Function, OneForm, RestrictedOneForm };

inline std::vector<Differential> monomial_pool(Kind kind, int delta, int max_deg) {
    std::vector<Differential> pool;
    int min_deg = kind == Kind::RestrictedOneForm ? 2 : (kind == Kind::Function ? 1 : 0);
    for (int d = min_deg; d <= max_deg; ++d)
        for (int a = 0; a <= d; ++a) {
            int b = d - a;
            if (kind == Kind::Function) {
                pool.push_back({BiPoly::monomial(Rat(1), a, b), BiPoly(), Rat(0)});
            } else {
                pool.push_back({BiPoly::monomial(Rat(1), a, b), BiPoly(), Rat(0)});
                pool.push_back({BiPoly(), BiPoly::monomial(Rat(1), a, b), Rat(0)});
            }
        }
    if (kind == Kind::RestrictedOneForm && delta == 2) pool.push_back({BiPoly(), BiPoly(), Rat(1)});
    return pool;
}

// Values (shifted for the restricted set) found by `trials` random rational
// combinations, restricted to the window.
inline std::set<ValuePoint> brute_values(const Bigerm& phi, Kind kind, ValuePoint window, Rng& rng, int trials,
                                         int max_deg = 6) {
    auto pool = monomial_pool(kind, phi.delta, max_deg);
    std::set<ValuePoint> out;
    int m1 = phi.m1(), m2 = phi.m2();
    for (int i = 0; i < trials; ++i) {
        Differential omega;
        int parts = 1 + static_cast<int>(rng.below(4));
        for (int p = 0; p < parts; ++p) {
            const Differential& g = rng.pick(pool);
            Rat c = rng.small_nonzero();
            omega.eta1 = omega.eta1 + scale(g.eta1, c);
            omega.eta2 = omega.eta2 + scale(g.eta2, c);
            omega.beta += g.beta * c;
        }
        if (omega.eta1.is_zero() && omega.eta2.is_zero() && omega.beta == 0) continue;
        ValueOrVanishing v = kind == Kind::Function ? value_of_function(omega.eta1, phi)
                                                    : value_of_differential(omega, phi);
        if (std::holds_alternative<BranchVanishing>(v)) continue;
        ValuePoint p = std::get<ValuePoint>(v);
        if (kind == Kind::RestrictedOneForm) {
            p.v1 -= m1;
            p.v2 -= m2;
        }
        if (p.v1 >= 0 && p.v2 >= 0 && p.v1 <= window.v1 && p.v2 <= window.v2) out.insert(p);
    }
    if (kind == Kind::Function) out.insert(ValuePoint{0, 0});
    return out;
}

// Independent fiber scan (set-theoretic, straight from the definitions).
inline std::set<ValuePoint> scan_maximal(const std::set<ValuePoint>& pts, ValuePoint conductor) {
    std::set<ValuePoint> out;
    for (const auto& p : pts) {
        if (p.v1 > conductor.v1 || p.v2 > conductor.v2) continue;
        bool f1 = false, f2 = false;
        for (const auto& q : pts) {
            if (q.v1 == p.v1 && q.v2 > p.v2) f1 = true;
            if (q.v2 == p.v2 && q.v1 > p.v1) f2 = true;
        }
        if (!f1 && !f2) out.insert(p);
    }
    return out;
}

}  // namespace bigerm::oracles
