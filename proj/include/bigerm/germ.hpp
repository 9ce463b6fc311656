#pragma once

#include <vector>

#include "bigerm/rng.hpp"
#include "bigerm/series.hpp"

namespace bigerm {

// One parametrized branch t -> (x(t), y(t)) of a plane curve germ.
struct Branch {
    UniSeries x;
    UniSeries y;

    Branch() = default;
    Branch(UniSeries x_, UniSeries y_);

    // min of component orders; throws on the zero branch
    int multiplicity() const;
    Var var() const { return x.var(); }
};

// delta = 1: distinct tangents, branch 1 x-dominant, branch 2 y-dominant.
// delta = 2: same tangent, both x-dominant.
struct Bigerm {
    Branch b1;
    Branch b2;
    int delta = 1;
    int trunc = kExactTrunc;  // working truncation for all computations

    int m1() const { return b1.multiplicity(); }
    int m2() const { return b2.multiplicity(); }

    const UniSeries& dominant(int branch) const;
    const UniSeries& free_comp(int branch) const;
    UniSeries& free_comp_mut(int branch);
    const Branch& branch(int i) const { return i == 1 ? b1 : b2; }
};

enum class GroupClass : unsigned char { General, A1, ATilde1, Homothety };

// Element (rho1, rho2, sigma) acting by phi_i -> sigma . phi_i . rho_i^{-1}.
struct GroupElement {
    UniSeries rho1;   // in t1, order 1
    UniSeries rho2;   // in t2, order 1
    BiPoly sigma_x;   // image of x
    BiPoly sigma_y;   // image of y
    GroupClass cls = GroupClass::General;
};

int detect_case(const Branch& b1, const Branch& b2);

// Structural checks: multiplicities, primitivity, orientation for delta,
// branch distinctness. Throws Error with a description on failure.
void validate(const Bigerm& phi);

bool is_puiseux(const Bigerm& phi);

// Checks the class-tag jet constraints and invertibility.
void validate(const GroupElement& g);

GroupElement identity_element(int trunc, int deg_bound);
GroupElement compose(const GroupElement& g, const GroupElement& h);  // action of g after h
GroupElement inverse(const GroupElement& g);

Bigerm apply(const GroupElement& g, const Bigerm& phi);

// Reparametrizes each branch so its dominant component is exactly t^m.
// Requires the dominant leading coefficients to have rational m-th roots.
Bigerm puiseux_normalize(const Bigerm& phi);

// [phi2, phi1]; for delta = 1 the coordinates are swapped as well so the
// result is again in Puiseux orientation.
Bigerm swap_branches(const Bigerm& phi);

Bigerm truncate_bigerm(const Bigerm& phi, int order_cap);

bool same_germ(const Branch& a, const Branch& b);

GroupElement random_group_element(Rng& rng, GroupClass cls, int trunc, int deg_bound, int size_bound = 3);

// Homothety compatible with Puiseux form over Q: dominant coefficients stay 1.
GroupElement rational_homothety(Rng& rng, int delta, int m1, int m2, int trunc, int deg_bound);

Bigerm random_bigerm(Rng& rng, int max_mult, int max_exp, int trunc);

}  // namespace bigerm
