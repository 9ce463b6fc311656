#pragma once

#include "bigerm/normalform.hpp"

namespace bigerm {

// Relation prod_j u_j^{exponents[j]} = ratio over the homothety unknowns
// (lambda1, lambda2) for distinct tangents, (lambda1, lambda2, alpha2) for a
// shared tangent. Exponents are integral by construction.
struct MultiplicativeConstraint {
    std::vector<Int> exponents;
    Rat ratio;
};

struct ShapeMismatch {
    std::string reason;
};

using ConstraintsOrMismatch = std::variant<std::vector<MultiplicativeConstraint>, ShapeMismatch>;

// Requires matching case label, delta, multiplicities, distinguished exponents
// and surviving supports; emits one constraint per surviving coefficient pair
// plus the dominant-coefficient compatibility relations.
ConstraintsOrMismatch homothety_constraints(const NormalForm& a, const NormalForm& b);

// True iff the assignment extends to a homomorphism into the multiplicative
// group of nonzero complex numbers: every integer relation among the exponent
// vectors must map to 1.
bool solvable_over_C(const std::vector<MultiplicativeConstraint>& constraints);

struct Verdict {
    bool equivalent = false;
    std::string branch_order;  // "as-given" or "swapped"
    std::string case_label;    // matched case when equivalent
    std::vector<MultiplicativeConstraint> constraints;
    std::string detail;
};

Verdict decide_equivalence(const Bigerm& phi, const Bigerm& psi);

}  // namespace bigerm
