#pragma once

#include <compare>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "bigerm/germ.hpp"

namespace bigerm {

struct ValuePoint {
    int v1 = 0;
    int v2 = 0;
    auto operator<=>(const ValuePoint&) const = default;
};

// Finite staircase fragment of a value set inside a window.
struct ValueSet {
    ValuePoint window;
    std::set<ValuePoint> points;
    std::optional<ValuePoint> conductor;
    bool quadrant_verified = false;
};

// omega = eta1 dx + (beta (delta-1) y + eta2) dy. Functions reuse the shape
// with the function stored in eta1 (see WitnessKind).
struct Differential {
    BiPoly eta1;
    BiPoly eta2;
    Rat beta{0};
};

enum class WitnessKind : unsigned char { Function, OneForm };

struct Witness {
    WitnessKind kind = WitnessKind::OneForm;
    Differential form;
};

using WitnessTable = std::map<ValuePoint, Witness>;

struct BranchVanishing {
    int branch;
};

using ValueOrVanishing = std::variant<ValuePoint, BranchVanishing>;

ValueOrVanishing value_of_function(const BiPoly& eta, const Bigerm& phi);
ValueOrVanishing value_of_differential(const Differential& omega, const Bigerm& phi);

// Pullback series of omega on one branch: eta1(phi) x' + (beta (delta-1) y +
// eta2)(phi) y'. The +1 order convention is applied by the value functions,
// not here.
UniSeries differential_pullback(const Differential& omega, const Bigerm& phi, int branch);
UniSeries witness_pullback(const Witness& w, const Bigerm& phi, int branch);

struct SatGenerator {
    Witness label;
    UniSeries p1;  // pullback on branch 1 (variable t1)
    UniSeries p2;  // pullback on branch 2 (variable t2)
};

struct SetWithWitnesses {
    ValueSet set;
    WitnessTable witnesses;
};

// Closure of all value pairs of rational combinations of the generators,
// restricted to the window. `offset` converts raw pullback orders into
// displayed values (0 for function values, +1 for differentials, +1-m for the
// multiplicity-shifted sets). Window is in displayed coordinates.
SetWithWitnesses saturate(const std::vector<SatGenerator>& gens, ValuePoint window, ValuePoint offset);

// Value sets at a fixed window (no adaptivity); phi must be Puiseux with a
// sufficient working truncation: max raw order = window - offset + (m1 + m2).
SetWithWitnesses gamma_at(const Bigerm& phi, ValuePoint window);
SetWithWitnesses lambda_at(const Bigerm& phi, ValuePoint window);
SetWithWitnesses lambda_delta_at(const Bigerm& phi, ValuePoint window);

// Adaptive versions: grow the window until the conductor is detected and
// re-verified on a doubled window. Input series must be exact (polynomial)
// or carry enough truncation. Throws when the cap is exceeded.
SetWithWitnesses gamma(const Bigerm& phi);
SetWithWitnesses lambda(const Bigerm& phi);
SetWithWitnesses lambda_delta(const Bigerm& phi);

// Same adaptivity without the doubled-window re-verification; used by the
// reduction and equivalence pipelines where the verified flag is not needed.
SetWithWitnesses gamma_unverified(const Bigerm& phi);
SetWithWitnesses lambda_unverified(const Bigerm& phi);
SetWithWitnesses lambda_delta_unverified(const Bigerm& phi);

std::set<int> branch_semigroup(const Branch& b, int* conductor_out = nullptr);

// ord_{t2} f1(phi2) with f1 the implicit equation of branch 1, computed as a
// resultant (multiplication-matrix determinant) on the truncated data.
int intersection_multiplicity(const Bigerm& phi);

std::set<ValuePoint> fiber(const ValueSet& v, int i, ValuePoint p);
std::set<ValuePoint> maximal_points(const ValueSet& v);

bool property_a_holds(const ValueSet& v);
bool property_b_holds(const ValueSet& v);

// Full invariant bundle for a bigerm given by exact (polynomial) branches:
// picks the working truncation adaptively from the detected conductor.
struct BigermInvariants {
    Bigerm normalized;       // Puiseux form at the working truncation
    ValueSet gamma;
    WitnessTable gamma_w;
    ValueSet lambda;
    WitnessTable lambda_w;
    ValueSet lambda_delta;
    WitnessTable lambda_delta_w;
    int conductor_max = 0;   // c = max(c1, c2) of the gamma conductor
    int spec_trunc = 0;      // determinacy bound c + m1 + m2
};

BigermInvariants compute_invariants(const Bigerm& input);

// Environment override for the adaptive truncation cap (BIGERM_TRUNCATION_CAP).
int truncation_cap();

}  // namespace bigerm
