#include "bigerm/germ.hpp"

#include <numeric>

namespace bigerm {

namespace {

int order_or_inf(const UniSeries& s) {
    auto o = s.order();
    return o ? *o : kExactTrunc;
}

// Tangent of a branch in Puiseux orientation: +1 = {y=0} (x dominant),
// -1 = {x=0} (y dominant), 0 = unreadable (equal orders).
int tangent_sign(const Branch& b) {
    int ox = order_or_inf(b.x), oy = order_or_inf(b.y);
    if (ox < oy) return 1;
    if (oy < ox) return -1;
    return 0;
}

UniSeries twist(const UniSeries& s) {  // s(-t)
    UniSeries r(s.var(), s.trunc());
    for (const auto& [e, c] : s.terms()) r.set_coeff(e, e % 2 ? -c : c);
    return r;
}

}  // namespace

Branch::Branch(UniSeries x_, UniSeries y_) : x(std::move(x_)), y(std::move(y_)) {
    if (x.var() != y.var()) throw Error("branch components must share a parameter variable");
}

int Branch::multiplicity() const {
    int m = std::min(order_or_inf(x), order_or_inf(y));
    if (m >= kExactTrunc) throw Error("multiplicity of the zero branch");
    return m;
}

const UniSeries& Bigerm::dominant(int branch) const {
    if (branch == 1) return b1.x;
    return delta == 1 ? b2.y : b2.x;
}

const UniSeries& Bigerm::free_comp(int branch) const {
    if (branch == 1) return b1.y;
    return delta == 1 ? b2.x : b2.y;
}

UniSeries& Bigerm::free_comp_mut(int branch) {
    if (branch == 1) return b1.y;
    return delta == 1 ? b2.x : b2.y;
}

int detect_case(const Branch& b1, const Branch& b2) {
    int s1 = tangent_sign(b1), s2 = tangent_sign(b2);
    if (s1 == 0 || s2 == 0)
        throw Error("detect_case: branch has equal component orders; tangent not readable in this orientation");
    return s1 == s2 ? 2 : 1;
}

void validate(const Bigerm& phi) {
    if (phi.b1.var() != Var::t1 || phi.b2.var() != Var::t2)
        throw Error("bigerm branches must use parameters t1 and t2 in order");
    if (phi.delta != 1 && phi.delta != 2) throw Error("tangency case must be 1 or 2");
    for (int i = 1; i <= 2; ++i) {
        const Branch& b = phi.branch(i);
        int ox = order_or_inf(b.x), oy = order_or_inf(b.y);
        if (std::min(ox, oy) < 1) throw Error("branch components must vanish at the parameter origin");
        int m = b.multiplicity();
        // primitivity over the known support
        long g = m;
        for (const auto& [e, c] : b.x.terms()) g = std::gcd(g, static_cast<long>(e));
        for (const auto& [e, c] : b.y.terms()) g = std::gcd(g, static_cast<long>(e));
        if (g != 1)
            throw Error("branch " + std::to_string(i) + " is not primitive (common factor " + std::to_string(g) +
                        " in exponents)");
    }
    int d = detect_case(phi.b1, phi.b2);
    if (d != phi.delta)
        throw Error("tangency case mismatch: declared " + std::to_string(phi.delta) + ", detected " + std::to_string(d));
    if (tangent_sign(phi.b1) != 1)
        throw Error("branch 1 must be x-dominant (tangent y = 0)");
    if (phi.delta == 2 && tangent_sign(phi.b2) != 1)
        throw Error("branch 2 must be x-dominant in the same-tangent case");
    if (phi.delta == 1 && tangent_sign(phi.b2) != -1)
        throw Error("branch 2 must be y-dominant in the distinct-tangent case");
    if (phi.delta == 2 && is_puiseux(phi) && same_germ(phi.b1, phi.b2))
        throw Error("the two branches parametrize the same germ");
}

bool is_puiseux(const Bigerm& phi) {
    for (int i = 1; i <= 2; ++i) {
        const UniSeries& dom = phi.dominant(i);
        int m = phi.branch(i).multiplicity();
        if (dom.terms().size() != 1 || dom.coeff(m) != 1) return false;
        const UniSeries& fre = phi.free_comp(i);
        if (!fre.is_zero() && *fre.order() <= m) return false;
    }
    return true;
}

void validate(const GroupElement& g) {
    for (const UniSeries* rho : {&g.rho1, &g.rho2}) {
        auto o = rho->order();
        if (!o || *o != 1) throw Error("group element reparametrization must have order 1");
    }
    if (g.sigma_x.coeff(0, 0) != 0 || g.sigma_y.coeff(0, 0) != 0)
        throw Error("group element coordinate change must fix the origin");
    Rat a = g.sigma_x.coeff(1, 0), b = g.sigma_x.coeff(0, 1);
    Rat c = g.sigma_y.coeff(1, 0), d = g.sigma_y.coeff(0, 1);
    if (a * d - b * c == 0) throw Error("group element coordinate change is not a local automorphism");
    auto rho_is_linear = [](const UniSeries& r) { return r.terms().size() == 1; };
    auto higher_only = [](const BiPoly& p, auto keep_linear) {
        for (const auto& [k, cc] : p.terms())
            if (k.first + k.second <= 1 && !keep_linear(k)) return false;
        return true;
    };
    switch (g.cls) {
        case GroupClass::A1:
            if (g.rho1.coeff(1) != 1 || g.rho2.coeff(1) != 1) throw Error("A1 element needs j1 rho = t");
            if (a != 1 || b != 0 || c != 0 || d != 1) throw Error("A1 element needs identity linear part");
            break;
        case GroupClass::ATilde1:
            if (g.rho1.coeff(1) != 1 || g.rho2.coeff(1) != 1) throw Error("same-tangent unipotent element needs j1 rho = t");
            if (a != 1 || c != 0 || d != 1) throw Error("same-tangent unipotent element needs linear part (x + b y, y)");
            break;
        case GroupClass::Homothety:
            if (!rho_is_linear(g.rho1) || !rho_is_linear(g.rho2)) throw Error("homothety rho must be linear");
            if (b != 0 || c != 0) throw Error("homothety linear part must be diagonal");
            if (!higher_only(g.sigma_x, [](const BiPoly::Key& k) { return k == BiPoly::Key{1, 0}; }) ||
                g.sigma_x.terms().size() != 1 || g.sigma_y.terms().size() != 1)
                throw Error("homothety coordinate change must be exactly (a x, b y)");
            break;
        case GroupClass::General:
            break;
    }
}

GroupElement identity_element(int trunc, int deg_bound) {
    GroupElement g;
    g.rho1 = UniSeries::variable(Var::t1, trunc);
    g.rho2 = UniSeries::variable(Var::t2, trunc);
    g.sigma_x = BiPoly::monomial(Rat(1), 1, 0, deg_bound);
    g.sigma_y = BiPoly::monomial(Rat(1), 0, 1, deg_bound);
    g.cls = GroupClass::A1;
    return g;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    GroupElement r;
    r.rho1 = reparametrize(g.rho1, h.rho1);
    r.rho2 = reparametrize(g.rho2, h.rho2);
    r.sigma_x = compose_bipoly_pair(g.sigma_x, h.sigma_x, h.sigma_y);
    r.sigma_y = compose_bipoly_pair(g.sigma_y, h.sigma_x, h.sigma_y);
    if (g.cls == h.cls && g.cls != GroupClass::General)
        r.cls = g.cls;
    else
        r.cls = GroupClass::General;
    return r;
}

GroupElement inverse(const GroupElement& g) {
    GroupElement r;
    r.rho1 = compositional_inverse(g.rho1);
    r.rho2 = compositional_inverse(g.rho2);
    int bound = std::min(g.sigma_x.deg_bound(), g.sigma_y.deg_bound());
    auto [tx, ty] = plane_inverse(g.sigma_x, g.sigma_y, bound);
    r.sigma_x = tx;
    r.sigma_y = ty;
    r.cls = g.cls;
    return r;
}

Bigerm apply(const GroupElement& g, const Bigerm& phi) {
    int t = phi.trunc;
    if (t >= kExactTrunc)
        t = std::min({g.rho1.trunc(), g.rho2.trunc(), kExactTrunc});
    if (t >= kExactTrunc) throw Error("apply: set a finite working truncation first");
    auto act = [&](const Branch& b, const UniSeries& rho) {
        UniSeries rinv = compositional_inverse(rho.truncated(t));
        UniSeries u = reparametrize(b.x.truncated(t), rinv);
        UniSeries v = reparametrize(b.y.truncated(t), rinv);
        return Branch(compose_bipoly(g.sigma_x, u, v).truncated(t), compose_bipoly(g.sigma_y, u, v).truncated(t));
    };
    Bigerm out;
    out.b1 = act(phi.b1, g.rho1);
    out.b2 = act(phi.b2, g.rho2);
    out.delta = phi.delta;
    out.trunc = t;
    return out;
}

namespace {

Branch normalize_branch(const Branch& br, bool x_dominant, int trunc) {
    UniSeries dom = (x_dominant ? br.x : br.y).truncated(trunc);
    UniSeries fre = (x_dominant ? br.y : br.x).truncated(trunc);
    int m = dom.order_or_throw("puiseux_normalize: dominant component");
    if (dom.terms().size() == 1 && dom.leading_coeff() == 1) {
        return x_dominant ? Branch(dom, fre) : Branch(fre, dom);
    }
    Rat lc = dom.leading_coeff();
    Rat q(1);
    if (lc != 1) {
        auto root = nth_root_rat(lc, m);
        if (!root)
            throw Error("puiseux_normalize: dominant leading coefficient " + rat_to_string(lc) + " has no rational " +
                        std::to_string(m) + "-th root; pre-scale by a homothety");
        q = *root;
    }
    // dom = (q t u(t)^{1/m})^m exactly, so the inverse substitution makes it t^m.
    UniSeries unit = divide_monomial(dom, lc, m);
    UniSeries psi = scale(UniSeries::variable(dom.var(), trunc) * unit_nth_root(unit, m), q);
    UniSeries rho = compositional_inverse(psi);
    UniSeries new_dom = UniSeries::monomial(dom.var(), Rat(1), m, trunc);
    UniSeries new_fre = reparametrize(fre, rho).truncated(trunc);
    return x_dominant ? Branch(new_dom, new_fre) : Branch(new_fre, new_dom);
}

}  // namespace

Bigerm puiseux_normalize(const Bigerm& phi) {
    int t = phi.trunc;
    if (t >= kExactTrunc) throw Error("puiseux_normalize: set a finite working truncation first");
    Bigerm out;
    out.b1 = normalize_branch(phi.b1, true, t);
    out.b2 = normalize_branch(phi.b2, phi.delta == 2, t);
    out.delta = phi.delta;
    out.trunc = t;
    return out;
}

Bigerm swap_branches(const Bigerm& phi) {
    Bigerm out;
    out.delta = phi.delta;
    out.trunc = phi.trunc;
    if (phi.delta == 2) {
        out.b1 = Branch(retag(phi.b2.x, Var::t1), retag(phi.b2.y, Var::t1));
        out.b2 = Branch(retag(phi.b1.x, Var::t2), retag(phi.b1.y, Var::t2));
    } else {
        // swapping the branch order swaps the tangents; swapping x and y
        // restores the orientation and is itself a change of coordinates
        out.b1 = Branch(retag(phi.b2.y, Var::t1), retag(phi.b2.x, Var::t1));
        out.b2 = Branch(retag(phi.b1.y, Var::t2), retag(phi.b1.x, Var::t2));
    }
    return out;
}

Bigerm truncate_bigerm(const Bigerm& phi, int order_cap) {
    auto chop = [&](const UniSeries& s) {
        UniSeries r(s.var(), s.trunc());
        for (const auto& [e, c] : s.terms())
            if (e <= order_cap) r.set_coeff(e, c);
        return r;
    };
    Bigerm out = phi;
    out.b1 = Branch(chop(phi.b1.x), chop(phi.b1.y));
    out.b2 = Branch(chop(phi.b2.x), chop(phi.b2.y));
    return out;
}

bool same_germ(const Branch& a, const Branch& b) {
    int sa = tangent_sign(a), sb = tangent_sign(b);
    if (sa != sb || sa == 0) return false;
    const UniSeries& dom_a = sa == 1 ? a.x : a.y;
    const UniSeries& dom_b = sa == 1 ? b.x : b.y;
    UniSeries fre_a = retag(sa == 1 ? a.y : a.x, Var::t1);
    UniSeries fre_b = retag(sa == 1 ? b.y : b.x, Var::t1);
    if (a.multiplicity() != b.multiplicity()) return false;
    int m = a.multiplicity();
    if (dom_a.terms().size() != 1 || dom_b.terms().size() != 1) return false;  // compare in Puiseux form only
    if (dom_a.leading_coeff() != dom_b.leading_coeff()) return false;
    int t = std::min(fre_a.trunc(), fre_b.trunc());
    UniSeries da = fre_a.truncated(t), db = fre_b.truncated(t);
    if (da == db) return true;
    return m % 2 == 0 && db == twist(da);
}

GroupElement random_group_element(Rng& rng, GroupClass cls, int trunc, int deg_bound, int size_bound) {
    GroupElement g;
    auto random_rho = [&](Var v, bool unit_jet) {
        Rat lc = unit_jet ? Rat(1) : rng.small_nonzero();
        UniSeries r = UniSeries::monomial(v, lc, 1, trunc);
        if (cls != GroupClass::Homothety)
            for (int k = 2; k <= 1 + size_bound; ++k)
                if (rng.chance(1, 2)) r.set_coeff(k, rng.small_nonzero());
        return r;
    };
    auto random_higher = [&]() {
        BiPoly p(deg_bound);
        for (int d = 2; d <= std::min(2 + size_bound, deg_bound); ++d)
            for (int i = 0; i <= d; ++i)
                if (rng.chance(1, 3)) p.set_coeff(i, d - i, rng.small_nonzero());
        return p;
    };
    switch (cls) {
        case GroupClass::A1:
            g.rho1 = random_rho(Var::t1, true);
            g.rho2 = random_rho(Var::t2, true);
            g.sigma_x = BiPoly::monomial(Rat(1), 1, 0, deg_bound) + random_higher();
            g.sigma_y = BiPoly::monomial(Rat(1), 0, 1, deg_bound) + random_higher();
            break;
        case GroupClass::ATilde1:
            g.rho1 = random_rho(Var::t1, true);
            g.rho2 = random_rho(Var::t2, true);
            g.sigma_x = BiPoly::monomial(Rat(1), 1, 0, deg_bound) +
                        BiPoly::monomial(rng.small_nonzero(), 0, 1, deg_bound) + random_higher();
            g.sigma_y = BiPoly::monomial(Rat(1), 0, 1, deg_bound) + random_higher();
            break;
        case GroupClass::Homothety:
            g.rho1 = random_rho(Var::t1, false);
            g.rho2 = random_rho(Var::t2, false);
            g.sigma_x = BiPoly::monomial(rng.small_nonzero(), 1, 0, deg_bound);
            g.sigma_y = BiPoly::monomial(rng.small_nonzero(), 0, 1, deg_bound);
            break;
        case GroupClass::General:
            g.rho1 = random_rho(Var::t1, false);
            g.rho2 = random_rho(Var::t2, false);
            g.sigma_x = BiPoly::monomial(rng.small_nonzero(), 1, 0, deg_bound) + random_higher();
            g.sigma_y = BiPoly::monomial(rng.small_nonzero(), 0, 1, deg_bound) + random_higher();
            break;
    }
    g.cls = cls;
    validate(g);
    return g;
}

GroupElement rational_homothety(Rng& rng, int delta, int m1, int m2, int trunc, int deg_bound) {
    GroupElement g;
    g.cls = GroupClass::Homothety;
    if (delta == 1) {
        Rat a1 = rng.small_nonzero(), a2 = rng.small_nonzero();
        g.rho1 = UniSeries::monomial(Var::t1, a1, 1, trunc);
        g.rho2 = UniSeries::monomial(Var::t2, a2, 1, trunc);
        g.sigma_x = BiPoly::monomial(pow_rat(a1, m1), 1, 0, deg_bound);
        g.sigma_y = BiPoly::monomial(pow_rat(a2, m2), 0, 1, deg_bound);
    } else {
        Rat w = rng.small_nonzero(), b = rng.small_nonzero();
        long lcm = std::lcm(static_cast<long>(m1), static_cast<long>(m2));
        g.rho1 = UniSeries::monomial(Var::t1, pow_rat(w, lcm / m1), 1, trunc);
        g.rho2 = UniSeries::monomial(Var::t2, pow_rat(w, lcm / m2), 1, trunc);
        g.sigma_x = BiPoly::monomial(pow_rat(w, lcm), 1, 0, deg_bound);
        g.sigma_y = BiPoly::monomial(b, 0, 1, deg_bound);
    }
    validate(g);
    return g;
}

Bigerm random_bigerm(Rng& rng, int max_mult, int max_exp, int trunc) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Bigerm phi;
        phi.delta = rng.chance(1, 2) ? 1 : 2;
        phi.trunc = trunc;
        auto make_branch = [&](Var v, bool x_dominant) {
            int m = static_cast<int>(rng.range(1, max_mult));
            UniSeries dom = UniSeries::monomial(v, Rat(1), m, trunc);
            UniSeries fre = UniSeries::zero(v, trunc);
            if (m > 1 || rng.chance(4, 5)) {
                long g = m;
                for (int e = m + 1; e <= m + max_exp; ++e)
                    if (rng.chance(1, 2)) {
                        fre.set_coeff(e, rng.small_nonzero());
                        g = std::gcd(g, static_cast<long>(e));
                    }
                if (g != 1 || fre.is_zero()) {
                    int e = m + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_exp)));
                    while (std::gcd(static_cast<long>(e), g) != 1) ++e;
                    fre.set_coeff(e, rng.small_nonzero());
                }
            }
            return x_dominant ? Branch(dom, fre) : Branch(fre, dom);
        };
        phi.b1 = make_branch(Var::t1, true);
        phi.b2 = make_branch(Var::t2, phi.delta == 2);
        try {
            validate(phi);
            return phi;
        } catch (const Error&) {
            continue;  // e.g. identical same-tangent branches; resample
        }
    }
    throw Error("random_bigerm: could not sample a valid bigerm");
}

}  // namespace bigerm
