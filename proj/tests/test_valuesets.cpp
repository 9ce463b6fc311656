#include "doctest.h"

#include "bigerm/valuesets.hpp"
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

const Bigerm cusp_pair = make({{2, 1}}, {{3, 1}}, {{3, 1}}, {{2, 1}}, 1);
const Bigerm node = make({{1, 1}}, {}, {}, {{1, 1}}, 1);
const Bigerm tangent_pair = make({{2, 1}}, {{5, 1}}, {{3, 1}}, {{7, 1}}, 2);

}  // namespace

TEST_CASE("value_of_function examples") {
    auto v = value_of_function(BiPoly::var_y(), cusp_pair);
    CHECK(std::get<ValuePoint>(v) == ValuePoint{3, 2});
    BiPoly cusp_eq = BiPoly::monomial(Rat(1), 0, 2) - BiPoly::monomial(Rat(1), 3, 0);
    auto bad = value_of_function(cusp_eq, cusp_pair);
    CHECK(std::get<BranchVanishing>(bad).branch == 1);
    auto xy = value_of_function(BiPoly::monomial(Rat(1), 1, 1), cusp_pair);
    CHECK(std::get<ValuePoint>(xy) == ValuePoint{5, 5});
}

TEST_CASE("value_of_differential examples") {
    Differential dx{BiPoly::monomial(Rat(1), 0, 0), BiPoly(), Rat(0)};
    CHECK(std::get<ValuePoint>(value_of_differential(dx, cusp_pair)) == ValuePoint{2, 3});
    Differential rot{BiPoly::var_y(), -BiPoly::var_x(), Rat(0)};  // y dx - x dy
    CHECK(std::get<ValuePoint>(value_of_differential(rot, cusp_pair)) == ValuePoint{5, 5});
    // d(eta) has the value of eta (characteristic zero)
    Rng rng(42);
    for (int i = 0; i < 25; ++i) {
        BiPoly eta;
        for (int n = 0; n < 3; ++n)
            eta.set_coeff(static_cast<int>(rng.range(0, 3)), static_cast<int>(rng.range(0, 3)), rng.small_nonzero());
        eta.set_coeff(0, 0, Rat(0));
        if (eta.is_zero()) continue;
        Differential deta{d_dx(eta), d_dy(eta), Rat(0)};
        auto vf = value_of_function(eta, cusp_pair);
        auto vd = value_of_differential(deta, cusp_pair);
        if (std::holds_alternative<ValuePoint>(vf)) {
            REQUIRE(std::holds_alternative<ValuePoint>(vd));
            CHECK(std::get<ValuePoint>(vf) == std::get<ValuePoint>(vd));
        }
    }
}

TEST_CASE("saturate: node monomials give the full quadrant") {
    std::vector<SatGenerator> gens;
    for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b) {
            if (a + b < 1) continue;
            SatGenerator g;
            g.label = Witness{WitnessKind::Function, {BiPoly::monomial(Rat(1), a, b), BiPoly(), Rat(0)}};
            g.p1 = (b == 0) ? UniSeries::monomial(Var::t1, Rat(1), a, 40) : UniSeries::zero(Var::t1, 40);
            g.p2 = (a == 0) ? UniSeries::monomial(Var::t2, Rat(1), b, 40) : UniSeries::zero(Var::t2, 40);
            gens.push_back(g);
        }
    auto sat = saturate(gens, ValuePoint{5, 5}, ValuePoint{0, 0});
    std::set<ValuePoint> expect;
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 5; ++b) expect.insert({a, b});
    CHECK(sat.set.points == expect);
    Rng rng(5);
    auto brute = oracles::brute_values(node, oracles::Kind::Function, {5, 5}, rng, 300);
    brute.erase({0, 0});
    for (const auto& p : brute) CHECK(expect.count(p));
}

TEST_CASE("saturate: single generator and no-tie closure") {
    SatGenerator g;
    g.label = Witness{WitnessKind::Function, {BiPoly::var_x(), BiPoly(), Rat(0)}};
    g.p1 = UniSeries::monomial(Var::t1, Rat(1), 2, 30);
    g.p2 = UniSeries::monomial(Var::t2, Rat(1), 3, 30);
    auto one = saturate({g}, ValuePoint{8, 8}, ValuePoint{0, 0});
    CHECK(one.set.points == std::set<ValuePoint>{{2, 3}});

    // no component ties: exactly the componentwise-min closure
    SatGenerator h;
    h.label = Witness{WitnessKind::Function, {BiPoly::var_y(), BiPoly(), Rat(0)}};
    h.p1 = UniSeries::monomial(Var::t1, Rat(1), 5, 30);
    h.p2 = UniSeries::monomial(Var::t2, Rat(1), 4, 30);
    auto two = saturate({g, h}, ValuePoint{8, 8}, ValuePoint{0, 0});
    CHECK(two.set.points == std::set<ValuePoint>{{2, 3}, {5, 4}});
}

TEST_CASE("gamma: node and cusp pair") {
    auto g = gamma(node);
    REQUIRE(g.set.conductor.has_value());
    CHECK(*g.set.conductor == ValuePoint{1, 1});
    for (const auto& p : g.set.points) CHECK((p == ValuePoint{0, 0} || (p.v1 >= 1 && p.v2 >= 1)));
    CHECK(g.set.quadrant_verified);

    auto c = gamma(cusp_pair);
    REQUIRE(c.set.conductor.has_value());
    CHECK(*c.set.conductor == ValuePoint{6, 6});
    // brute-force quadrant check on a widened window
    auto cw = gamma_at(puiseux_normalize(Bigerm{cusp_pair.b1, cusp_pair.b2, 1, 30}), ValuePoint{14, 14});
    for (int a = 6; a <= 14; ++a)
        for (int b = 6; b <= 14; ++b) CHECK(cw.set.points.count({a, b}));
    for (int b = 0; b < 6; ++b) CHECK(cw.set.points.count({6, b}) == (b == 4 ? 1 : 0));

    auto vx = value_of_function(BiPoly::var_x(), tangent_pair);
    CHECK(std::get<ValuePoint>(vx) == ValuePoint{2, 3});
}

TEST_CASE("branch semigroups") {
    int cond = -1;
    auto s = branch_semigroup(Branch(ser(Var::t1, {{2, 1}}), ser(Var::t1, {{3, 1}})), &cond);
    CHECK(cond == 2);
    CHECK(s.count(0));
    CHECK(!s.count(1));
    CHECK(s.count(2));
    CHECK(s.count(3));
    CHECK(s.count(4));

    auto smooth = branch_semigroup(Branch(ser(Var::t1, {{1, 1}}), ser(Var::t1, {{4, 1}, {5, 2}})), &cond);
    CHECK(cond == 0);
    CHECK(smooth.count(1));

    Branch b34(ser(Var::t1, {{3, 1}}), ser(Var::t1, {{4, 1}, {5, 1}}));
    auto s34 = branch_semigroup(b34, &cond);
    CHECK(cond == 6);
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        BiPoly eta;
        for (int n = 0; n < 3; ++n)
            eta.set_coeff(static_cast<int>(rng.range(0, 4)), static_cast<int>(rng.range(0, 4)), rng.small_nonzero());
        eta.set_coeff(0, 0, Rat(0));
        if (eta.is_zero()) continue;
        UniSeries pull = compose_bipoly(eta, b34.x.truncated(40), b34.y.truncated(40));
        if (auto o = pull.order(); o && *o <= 12) CHECK(s34.count(*o));
    }
}

TEST_CASE("intersection multiplicity: transversal lines, cusp pair, tangent smooth pair") {
    CHECK(intersection_multiplicity(node) == 1);
    CHECK(intersection_multiplicity(cusp_pair) == 4);
    Bigerm smooth2 = make({{1, 1}}, {{2, 1}}, {{1, 1}}, {{3, 1}}, 2);
    CHECK(intersection_multiplicity(smooth2) == 2);
    CHECK(intersection_multiplicity(swap_branches(cusp_pair)) == 4);
    CHECK(intersection_multiplicity(swap_branches(smooth2)) == 2);
}

TEST_CASE("lambda: containments and explicit points") {
    auto l = lambda(cusp_pair);
    CHECK(l.set.points.count({2, 3}));  // dx
    CHECK(l.set.points.count({3, 2}));  // dy
    auto g = gamma(cusp_pair);
    for (const auto& p : g.set.points) {
        if (p == ValuePoint{0, 0}) continue;
        if (p.v1 <= l.set.window.v1 && p.v2 <= l.set.window.v2) CHECK(l.set.points.count(p));
    }
    Rng rng(10);
    auto brute = oracles::brute_values(cusp_pair, oracles::Kind::OneForm, {8, 8}, rng, 400);
    for (const auto& p : brute) CHECK(l.set.points.count(p));
}

TEST_CASE("gamma within lambda on random bigerms") {
    Rng rng(11);
    for (int i = 0; i < 15; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 3, kExactTrunc);
        auto g = gamma(phi);
        auto l = lambda(phi);
        for (const auto& p : g.set.points) {
            if (p == ValuePoint{0, 0}) continue;
            if (p.v1 <= l.set.window.v1 && p.v2 <= l.set.window.v2) CHECK(l.set.points.count(p));
        }
    }
}

TEST_CASE("lambda_delta: shift containment and the y dy gate") {
    auto ld = lambda_delta(tangent_pair);
    auto l = lambda(tangent_pair);
    int m1 = 2, m2 = 3;
    for (const auto& p : ld.set.points) {
        ValuePoint shifted{p.v1 + m1, p.v2 + m2};
        if (shifted.v1 <= l.set.window.v1 && shifted.v2 <= l.set.window.v2) CHECK(l.set.points.count(shifted));
    }
    // distinct tangents: the y dy direction is not allowed, so no value with a
    // low second component can appear
    auto ld1 = lambda_delta(cusp_pair);
    for (const auto& p : ld1.set.points) CHECK(p.v2 > 1);
    // same tangent: y dy is a generator and contributes its value
    Bigerm tp = tangent_pair;
    tp.trunc = 40;
    Bigerm tpn = puiseux_normalize(tp);
    auto wide = lambda_delta_at(tpn, ValuePoint{14, 14});
    CHECK(wide.set.points.count({8, 11}));

    Rng rng(12);
    auto brute = oracles::brute_values(tangent_pair, oracles::Kind::RestrictedOneForm, {10, 10}, rng, 500);
    auto at10 = lambda_delta_at(tpn, ValuePoint{10, 10});
    for (const auto& p : brute) CHECK(at10.set.points.count(p));
}

TEST_CASE("fiber examples and window guard") {
    ValueSet v;
    v.window = {6, 6};
    v.points = {{1, 1}, {1, 3}, {2, 1}};
    CHECK(fiber(v, 1, {1, 1}) == std::set<ValuePoint>{{1, 3}});
    CHECK(fiber(v, 2, {1, 1}) == std::set<ValuePoint>{{2, 1}});
    CHECK(fiber(v, 1, {2, 1}).empty());
    CHECK_THROWS_AS(fiber(v, 1, {7, 0}), Error);
}

TEST_CASE("maximal points: literal fiber-scan semantics") {
    auto g = gamma(node);
    auto m = maximal_points(g.set);
    CHECK(m == oracles::scan_maximal(g.set.points, *g.set.conductor));
    CHECK(m == std::set<ValuePoint>{{0, 0}});

    ValueSet v;
    v.window = {7, 5};
    v.points = {{0, 0}, {2, 3}, {5, 1}, {5, 3}};
    for (int a = 5; a <= 7; ++a)
        for (int b = 3; b <= 5; ++b) v.points.insert({a, b});
    v.conductor = ValuePoint{5, 3};
    CHECK(maximal_points(v) == oracles::scan_maximal(v.points, {5, 3}));

    auto ld = lambda_delta(tangent_pair);
    REQUIRE(ld.set.conductor.has_value());
    CHECK(maximal_points(ld.set) == oracles::scan_maximal(ld.set.points, *ld.set.conductor));
}

TEST_CASE("properties A and B hold on computed sets") {
    Rng rng(13);
    for (int i = 0; i < 10; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 3, kExactTrunc);
        auto g = gamma(phi);
        auto l = lambda(phi);
        auto d = lambda_delta(phi);
        for (const auto* s : {&g.set, &l.set, &d.set}) {
            CHECK(property_a_holds(*s));
            CHECK(property_b_holds(*s));
        }
    }
}

TEST_CASE("witnesses evaluate to their keys") {
    for (const Bigerm* phi : {&cusp_pair, &tangent_pair, &node}) {
        BigermInvariants inv = compute_invariants(*phi);
        CHECK(inv.gamma_w.size() == inv.gamma.points.size());
        CHECK(inv.lambda_w.size() == inv.lambda.points.size());
        CHECK(inv.lambda_delta_w.size() == inv.lambda_delta.points.size());
        for (const auto& [p, w] : inv.gamma_w) {
            auto v = value_of_function(w.form.eta1, inv.normalized);
            REQUIRE(std::holds_alternative<ValuePoint>(v));
            CHECK(std::get<ValuePoint>(v) == p);
        }
        for (const auto& [p, w] : inv.lambda_w) {
            auto v = value_of_differential(w.form, inv.normalized);
            REQUIRE(std::holds_alternative<ValuePoint>(v));
            CHECK(std::get<ValuePoint>(v) == p);
        }
        int m1 = inv.normalized.m1(), m2 = inv.normalized.m2();
        for (const auto& [p, w] : inv.lambda_delta_w) {
            auto v = value_of_differential(w.form, inv.normalized);
            REQUIRE(std::holds_alternative<ValuePoint>(v));
            CHECK(std::get<ValuePoint>(v) == ValuePoint{p.v1 + m1, p.v2 + m2});
        }
    }
}

TEST_CASE("conductor stability under window doubling") {
    Rng rng(14);
    for (int i = 0; i < 6; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 3, kExactTrunc);
        auto g = gamma(phi);
        REQUIRE(g.set.conductor.has_value());
        CHECK(g.set.quadrant_verified);
        int margin = phi.m1() + phi.m2();
        int w2 = 2 * std::max(g.set.window.v1, g.set.window.v2);
        Bigerm wide = puiseux_normalize(Bigerm{phi.b1, phi.b2, phi.delta, w2 + margin});
        auto g2 = gamma_at(wide, ValuePoint{w2, w2});
        CHECK(g2.set.conductor == g.set.conductor);
        for (const auto& p : g2.set.points)
            if (p.v1 <= g.set.window.v1 && p.v2 <= g.set.window.v2) CHECK(g.set.points.count(p));
        for (const auto& p : g.set.points) CHECK(g2.set.points.count(p));
    }
}

TEST_CASE("saturated sets contain all brute-force values on random bigerms") {
    Rng rng(15);
    for (int i = 0; i < 6; ++i) {
        Bigerm phi = random_bigerm(rng, 3, 3, kExactTrunc);
        BigermInvariants inv = compute_invariants(phi);
        ValuePoint wl{std::min(inv.lambda.window.v1, 20), std::min(inv.lambda.window.v2, 20)};
        auto brute = oracles::brute_values(inv.normalized, oracles::Kind::OneForm, wl, rng, 150);
        for (const auto& p : brute) CHECK(inv.lambda.points.count(p));
        ValuePoint wd{std::min(inv.lambda_delta.window.v1, 20), std::min(inv.lambda_delta.window.v2, 20)};
        auto bruted = oracles::brute_values(inv.normalized, oracles::Kind::RestrictedOneForm, wd, rng, 150);
        for (const auto& p : bruted) CHECK(inv.lambda_delta.points.count(p));
    }
}
