#include "doctest.h"

#include "bigerm/equivalence.hpp"
#include "bigerm/normalform.hpp"
#include "oracles.hpp"

using namespace bigerm;

namespace {

UniSeries ser(Var v, std::initializer_list<std::pair<int, long>> terms) {
    UniSeries s(v);
    for (auto [e, c] : terms) s.set_coeff(e, Rat(c));
    return s;
}

Bigerm make(std::initializer_list<std::pair<int, long>> x1, std::initializer_list<std::pair<int, long>> y1,
            std::initializer_list<std::pair<int, long>> x2, std::initializer_list<std::pair<int, long>> y2, int delta,
            int trunc = 60) {
    Bigerm phi;
    phi.b1 = Branch(ser(Var::t1, x1), ser(Var::t1, y1));
    phi.b2 = Branch(ser(Var::t2, x2), ser(Var::t2, y2));
    phi.delta = delta;
    phi.trunc = trunc;
    return phi;
}

std::map<int, Rat> terms_of(const UniSeries& s) {
    return {s.terms().begin(), s.terms().end()};
}

bool reduced_equal(const Bigerm& a, const Bigerm& b) {
    return terms_of(a.free_comp(1)) == terms_of(b.free_comp(1)) && terms_of(a.free_comp(2)) == terms_of(b.free_comp(2));
}

}  // namespace

TEST_CASE("removable_exponents: definitions and the maximal-point convention") {
    // artificial set: F1((k,k)) nonempty for every diagonal above m1
    ValueSet v;
    v.window = {8, 8};
    for (int k = 1; k <= 8; ++k) {
        v.points.insert({k, k});
        if (k < 8) v.points.insert({k, k + 1});
        v.points.insert({k + 1 <= 8 ? k + 1 : 8, k});
    }
    v.conductor = ValuePoint{1, 1};
    RemovableExponents rem = removable_exponents(v, 2, 3, 2);
    for (int k = 3; k <= 7; ++k) CHECK(rem.branch1.count(k));
    CHECK(!rem.branch1.count(2));  // k must exceed the multiplicity
    CHECK(!rem.branch2.count(3));
    CHECK(rem.branch2.count(4));

    // an isolated diagonal (both fibers empty) is removable on branch 1 only
    ValueSet w;
    w.window = {8, 8};
    w.points = {{3, 3}, {5, 4}, {4, 5}};
    for (int a = 5; a <= 8; ++a)
        for (int b = 5; b <= 8; ++b) w.points.insert({a, b});
    w.conductor = ValuePoint{5, 5};
    RemovableExponents rem2 = removable_exponents(w, 2, 2, 2);
    CHECK(rem2.branch1.count(3));
    CHECK(!rem2.branch2.count(3));
}

TEST_CASE("removable exponents of the tangent pair agree with a fiber scan") {
    Bigerm phi = make({{2, 1}}, {{5, 1}}, {{3, 1}}, {{7, 1}}, 2);
    auto ld = lambda_delta(phi);
    REQUIRE(ld.set.conductor.has_value());
    RemovableExponents rem = removable_exponents(ld.set, 2, 3, 2);
    auto maximal = oracles::scan_maximal(ld.set.points, *ld.set.conductor);
    for (int k = 1; k <= std::min(ld.set.window.v1, ld.set.window.v2); ++k) {
        bool f1 = false, f2 = false;
        for (const auto& q : ld.set.points) {
            if (q.v1 == k && q.v2 > k) f1 = true;
            if (q.v2 == k && q.v1 > k) f2 = true;
        }
        bool diag_max = maximal.count({k, k}) > 0;
        CHECK(rem.branch1.count(k) == (k > 2 && (f1 || diag_max) ? 1 : 0));
        CHECK(rem.branch2.count(k) == (k > 3 && f2 ? 1 : 0));
    }
}

TEST_CASE("correction_from_witness: induced tangent vector shapes") {
    Bigerm phi = puiseux_normalize(make({{2, 1}}, {{5, 1}}, {{3, 1}}, {{7, 1}}, 2, 40));
    auto ld = lambda_delta_at(phi, ValuePoint{12, 12});

    // pick a witness with value (k, > k): the induced vector must vanish in
    // both x-slots and on branch 2 below order k+1
    for (const auto& [p, w] : ld.witnesses) {
        if (p.v1 >= p.v2 || p.v1 <= 2) continue;
        int k = p.v1;
        TangentCorrection corr = correction_from_witness(w.form, phi, k);
        BiPoly eta1_full = corr.eta1;
        if (phi.delta == 2 && corr.beta != 0) eta1_full = eta1_full + BiPoly::monomial(corr.beta, 0, 1);
        // Eq-vector per branch: (x' eps + eta1(phi), y' eps + eta2(phi))
        UniSeries v1x = derive(phi.b1.x) * corr.eps1 + compose_bipoly(eta1_full, phi.b1.x, phi.b1.y);
        UniSeries v1y = derive(phi.b1.y) * corr.eps1 + compose_bipoly(corr.eta2, phi.b1.x, phi.b1.y);
        UniSeries v2x = derive(phi.b2.x) * corr.eps2 + compose_bipoly(eta1_full, phi.b2.x, phi.b2.y);
        UniSeries v2y = derive(phi.b2.y) * corr.eps2 + compose_bipoly(corr.eta2, phi.b2.x, phi.b2.y);
        CHECK(v1x.is_zero());
        CHECK(v2x.is_zero());
        REQUIRE(v1y.order().has_value());
        CHECK(*v1y.order() == k);  // h1 has order k = first shifted value
        CHECK((v2y.is_zero() || *v2y.order() == p.v2));
        break;
    }
}

TEST_CASE("correction_from_witness: the y dy direction in the same-tangent case") {
    Bigerm phi = puiseux_normalize(make({{2, 1}}, {{5, 1}}, {{3, 1}}, {{7, 1}}, 2, 40));
    Differential ydy{BiPoly(), BiPoly(), Rat(1)};
    auto v = value_of_differential(ydy, phi);
    REQUIRE(std::holds_alternative<ValuePoint>(v));
    ValuePoint val = std::get<ValuePoint>(v);
    TangentCorrection corr = correction_from_witness(ydy, phi, val.v1 - 2);
    CHECK(corr.beta == -1);
    BiPoly eta1_full = corr.eta1 + BiPoly::monomial(corr.beta, 0, 1);
    UniSeries v1x = derive(phi.b1.x) * corr.eps1 + compose_bipoly(eta1_full, phi.b1.x, phi.b1.y);
    UniSeries v1y = derive(phi.b1.y) * corr.eps1 + compose_bipoly(corr.eta2, phi.b1.x, phi.b1.y);
    CHECK(v1x.is_zero());
    REQUIRE(v1y.order().has_value());
    CHECK(*v1y.order() == val.v1 - 2);  // h1 = omega(phi1)/(m1 t^{m1-1})

    // round trip: the correction data reassembles to a form with the same value
    Differential back{corr.eta2, -corr.eta1, -corr.beta};
    auto v2 = value_of_differential(back, phi);
    REQUIRE(std::holds_alternative<ValuePoint>(v2));
    CHECK(std::get<ValuePoint>(v2) == val);

    // forms outside the allowed module are rejected
    Differential linear{BiPoly::var_x(), BiPoly(), Rat(0)};
    CHECK_THROWS_AS(correction_from_witness(linear, phi, 4), Error);
}

TEST_CASE("eliminate_term: no-op, jet preservation, invariant preservation") {
    BigermInvariants inv = compute_invariants(make({{2, 1}}, {{5, 1}, {7, 1}}, {{3, 1}}, {{7, 1}}, 2, kExactTrunc));
    Bigerm phi = inv.normalized;
    ValuePoint w = inv.lambda_delta.window;
    auto ld = lambda_delta_at(phi, w);
    REQUIRE(ld.set.conductor.has_value());
    RemovableExponents rem = removable_exponents(ld.set, 2, 3, 2);

    // zero coefficient: nothing happens
    if (rem.branch2.count(8)) {
        Bigerm same = eliminate_term(phi, 2, 8, ld.witnesses);
        CHECK(reduced_equal(same, phi));
    }

    REQUIRE(rem.branch1.count(7));
    Bigerm after = eliminate_term(phi, 1, 7, ld.witnesses);
    CHECK(after.b1.y.coeff(7) == 0);
    // the 6-jet of both branches is untouched
    for (int e = 0; e <= 6; ++e) {
        CHECK(after.b1.y.coeff(e) == phi.b1.y.coeff(e));
        CHECK(after.b2.y.coeff(e) == phi.b2.y.coeff(e));
    }
    // value sets are unchanged
    auto ld2 = lambda_delta_at(after, w);
    CHECK(ld2.set.points == ld.set.points);
    auto g1 = gamma_at(phi, inv.gamma.window);
    auto g2 = gamma_at(after, inv.gamma.window);
    CHECK(g1.set.points == g2.set.points);
}

TEST_CASE("reduce_A_delta: monomial fixed points and idempotence") {
    Bigerm cusp_pair = make({{2, 1}}, {{3, 1}}, {{3, 1}}, {{2, 1}}, 1);
    Bigerm red = reduce_A_delta(cusp_pair);
    CHECK(terms_of(red.b1.y) == std::map<int, Rat>{{3, Rat(1)}});
    CHECK(terms_of(red.b2.x) == std::map<int, Rat>{{3, Rat(1)}});

    Rng rng(21);
    for (int i = 0; i < 20; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 4, kExactTrunc);
        Bigerm once = reduce_A_delta(phi);
        Bigerm twice = reduce_A_delta(once);
        CHECK(reduced_equal(once, twice));
    }
}

TEST_CASE("reduce_A_delta: support invariant via fiber scan") {
    Rng rng(22);
    for (int i = 0; i < 10; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 4, kExactTrunc);
        NormalForm nf = normal_form(phi);
        REQUIRE(nf.lambda_delta.conductor.has_value());
        auto maximal = oracles::scan_maximal(nf.lambda_delta.points, *nf.lambda_delta.conductor);
        for (const auto& tm : nf.terms) {
            bool f1 = false, f2 = false;
            for (const auto& q : nf.lambda_delta.points) {
                if (q.v1 == tm.exp && q.v2 > tm.exp) f1 = true;
                if (q.v2 == tm.exp && q.v1 > tm.exp) f2 = true;
            }
            if (tm.branch == 1) {
                CHECK(!f1);
                CHECK(!maximal.count({tm.exp, tm.exp}));
            } else {
                CHECK(!f2);
            }
        }
    }
}

TEST_CASE("reduction is constant on orbits") {
    Rng rng(23);
    for (int i = 0; i < 6; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 4, kExactTrunc);
        Bigerm base = reduce_A_delta(phi);
        GroupClass cls = phi.delta == 2 ? GroupClass::ATilde1 : GroupClass::A1;
        Bigerm phi_t = phi;
        phi_t.trunc = 30;
        Bigerm moved = apply(random_group_element(rng, cls, 30, 31, 2), phi_t);
        Bigerm red = reduce_A_delta(moved);
        CHECK(reduced_equal(base, red));
    }
}

TEST_CASE("homothety_normalize and classify: the three shapes") {
    // monomial transversal pair: case b, both pivots trivially 1
    NormalForm b = normal_form(make({{2, 1}}, {{3, 1}}, {{7, 1}}, {{2, 1}}, 1));
    CHECK(b.case_label == "b");
    REQUIRE(b.terms.size() == 2);
    for (const auto& tm : b.terms) {
        CHECK(tm.flag == TermFlag::Pivot);
        CHECK(tm.coeff == 1);
    }
    CHECK(b.j1 == 3);
    CHECK(b.j2 == 7);

    // non-unit coefficients here demand irrational scalings (the exponent
    // determinant is 3*7 - 2*2 = 17): pivots stay pending over Q
    NormalForm bp = normal_form(make({{2, 1}}, {{3, 2}}, {{7, 3}}, {{2, 1}}, 1));
    CHECK(bp.case_label == "b");
    REQUIRE(bp.terms.size() == 2);
    for (const auto& tm : bp.terms) CHECK(tm.flag == TermFlag::PendingScale);
    // and the two are still equivalent over C (one-dimensional orbit family)
    CHECK(decide_equivalence(make({{2, 1}}, {{3, 1}}, {{7, 1}}, {{2, 1}}, 1),
                             make({{2, 1}}, {{3, 2}}, {{7, 3}}, {{2, 1}}, 1))
              .equivalent);

    // equal monomial same-tangent pair: one pivot, rational parameter
    NormalForm c = normal_form(make({{2, 1}}, {{5, 1}}, {{2, 1}}, {{5, 3}}, 2));
    CHECK(c.case_label == "c'");
    REQUIRE(c.terms.size() == 2);
    CHECK(c.terms[0].flag == TermFlag::Pivot);
    CHECK(c.terms[0].coeff == 1);
    CHECK(c.terms[1].flag == TermFlag::Kept);
    CHECK(c.terms[1].coeff == 3);

    // transversal smooth pair: case d
    NormalForm d = normal_form(make({{1, 1}}, {}, {}, {{1, 1}}, 1));
    CHECK(d.case_label == "d");
    CHECK(d.terms.empty());
}

TEST_CASE("normal form of a generic (2,3)-class sample lands on the table shapes") {
    // branch semigroups <3,4> and <2,3>, transversal
    Bigerm phi = make({{3, 1}}, {{4, 1}, {5, 2}, {7, 1}}, {{3, 1}, {4, -1}}, {{2, 1}}, 1);
    NormalForm nf = normal_form(phi);
    std::set<int> s1, s2;
    for (const auto& tm : nf.terms) (tm.branch == 1 ? s1 : s2).insert(tm.exp);
    bool family1 = s1 == std::set<int>{4} && s2 == std::set<int>{3};
    bool family2 = s1 == std::set<int>{4, 5} && s2 == std::set<int>{3};
    CHECK((family1 || family2));
}

TEST_CASE("truncation stability of the normal form") {
    Rng rng(24);
    for (int i = 0; i < 6; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 4, kExactTrunc);
        auto g = gamma(phi);
        REQUIRE(g.set.conductor.has_value());
        int c = std::max(g.set.conductor->v1, g.set.conductor->v2);
        int m = phi.m1() + phi.m2();
        NormalForm a = normal_form(truncate_bigerm(phi, c - 1));
        NormalForm b = normal_form(truncate_bigerm(phi, c + m));
        CHECK(a.case_label == b.case_label);
        REQUIRE(a.terms.size() == b.terms.size());
        for (std::size_t t = 0; t < a.terms.size(); ++t) {
            CHECK(a.terms[t].branch == b.terms[t].branch);
            CHECK(a.terms[t].exp == b.terms[t].exp);
            CHECK(a.terms[t].coeff == b.terms[t].coeff);
        }
    }
}

TEST_CASE("gamma and lambda_delta are unchanged by the whole pipeline") {
    Rng rng(25);
    for (int i = 0; i < 5; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 4, kExactTrunc);
        BigermInvariants inv = compute_invariants(phi);
        NormalForm nf = normal_form(phi);
        Bigerm red = nf.reduced;
        red.trunc = inv.normalized.trunc;
        auto g = gamma_at(puiseux_normalize(red), inv.gamma.window);
        CHECK(g.set.points == inv.gamma.points);
        auto ld = lambda_delta_at(puiseux_normalize(red), inv.lambda_delta.window);
        CHECK(ld.set.points == inv.lambda_delta.points);
    }
}
