#pragma once

#include <string>

#include "bigerm/valuesets.hpp"

namespace bigerm {

// Data inducing the orbit-tangent vector
//   (phi_i1' eps_i + eta1(phi_i), phi_i2' eps_i + eta2(phi_i))
// per branch, where the full x-field is eta1 + beta (delta-1) y.
struct TangentCorrection {
    UniSeries eps1;
    UniSeries eps2;
    BiPoly eta1;  // degree >= 2 part
    BiPoly eta2;
    Rat beta{0};  // coefficient of the y d/dx direction (same-tangent case)
    int k = 0;
};

struct RemovableExponents {
    std::set<int> branch1;
    std::set<int> branch2;
};

// Diagonal exponents that can be cleared: branch 1 keeps j only when the
// vertical fiber of (j,j) is empty and (j,j) is not a maximal point; branch 2
// keeps j only when the horizontal fiber is empty. Maximal diagonals are
// cleared on branch 1 by convention.
RemovableExponents removable_exponents(const ValueSet& lambda_delta_set, int m1, int m2, int delta);

TangentCorrection correction_from_witness(const Differential& omega, const Bigerm& phi, int k);

// Zeroes the order-k coefficient of the designated branch's free component by
// one group-element application (the flow of the witness correction), leaving
// all lower jets untouched. Re-normalizes to Puiseux form.
Bigerm eliminate_term(const Bigerm& phi, int branch, int k, const WitnessTable& table);

enum class TermFlag : unsigned char { Kept, Pivot, PendingScale };

struct SurvivingTerm {
    int branch;
    int exp;
    Rat coeff;
    TermFlag flag;
};

struct NormalForm {
    Bigerm reduced;
    std::vector<SurvivingTerm> terms;
    std::string case_label;
    bool mirrored = false;  // shape matches the classified case with branch roles reversed
    std::optional<int> j1, j2, k;
    ValueSet gamma;
    ValueSet lambda_delta;
    int conductor_max = 0;
};

Bigerm reduce_A_delta(const Bigerm& phi);

NormalForm homothety_normalize(const Bigerm& reduced, const ValueSet& gamma_set, const ValueSet& lambda_delta_set,
                               int conductor_max);

std::string classify(const NormalForm& nf);

// Full pipeline: invariants, term elimination, determinacy truncation,
// homothety normalization, classification.
NormalForm normal_form(const Bigerm& input);

}  // namespace bigerm
