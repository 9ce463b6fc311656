#include "bigerm/valuesets.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

namespace bigerm {

namespace {

constexpr int kInf = kExactTrunc;

int capped_order(const UniSeries& s, int cap) {
    auto o = s.order();
    if (!o || *o > cap) return kInf;
    return *o;
}

int order_or_inf(const UniSeries& s) {
    auto o = s.order();
    return o ? *o : kInf;
}

int effective_trunc(const Bigerm& phi) {
    return std::min({phi.trunc, phi.b1.x.trunc(), phi.b1.y.trunc(), phi.b2.x.trunc(), phi.b2.y.trunc()});
}

Bigerm at_trunc(const Bigerm& phi, int t) {
    Bigerm r = phi;
    r.trunc = t;
    return r;
}

Differential scaled_form(const Differential& f, const Rat& c) {
    return Differential{scale(f.eta1, c), scale(f.eta2, c), f.beta * c};
}

Differential add_form(const Differential& a, const Differential& b) {
    return Differential{a.eta1 + b.eta1, a.eta2 + b.eta2, a.beta + b.beta};
}

}  // namespace

ValueOrVanishing value_of_function(const BiPoly& eta, const Bigerm& phi) {
    if (eta.is_zero()) throw Error("value_of_function: zero function");
    int t = effective_trunc(phi);
    UniSeries p1 = compose_bipoly(eta, phi.b1.x, phi.b1.y).truncated(t);
    if (p1.is_zero()) return BranchVanishing{1};
    UniSeries p2 = compose_bipoly(eta, phi.b2.x, phi.b2.y).truncated(t);
    if (p2.is_zero()) return BranchVanishing{2};
    return ValuePoint{*p1.order(), *p2.order()};
}

UniSeries differential_pullback(const Differential& omega, const Bigerm& phi, int branch) {
    const Branch& b = branch == 1 ? phi.b1 : phi.b2;
    int t = effective_trunc(phi);
    UniSeries part1 = compose_bipoly(omega.eta1, b.x, b.y) * derive(b.x);
    UniSeries coef2 = compose_bipoly(omega.eta2, b.x, b.y);
    if (phi.delta == 2 && omega.beta != 0) coef2 = coef2 + scale(b.y, omega.beta);
    return (part1 + coef2 * derive(b.y)).truncated(t - 1 >= 0 ? t - 1 : 0);
}

UniSeries witness_pullback(const Witness& w, const Bigerm& phi, int branch) {
    const Branch& b = branch == 1 ? phi.b1 : phi.b2;
    if (w.kind == WitnessKind::Function)
        return compose_bipoly(w.form.eta1, b.x, b.y).truncated(effective_trunc(phi));
    return differential_pullback(w.form, phi, branch);
}

ValueOrVanishing value_of_differential(const Differential& omega, const Bigerm& phi) {
    if (omega.eta1.is_zero() && omega.eta2.is_zero() && omega.beta == 0)
        throw Error("value_of_differential: zero form");
    UniSeries p1 = differential_pullback(omega, phi, 1);
    if (p1.is_zero()) return BranchVanishing{1};
    UniSeries p2 = differential_pullback(omega, phi, 2);
    if (p2.is_zero()) return BranchVanishing{2};
    return ValuePoint{*p1.order() + 1, *p2.order() + 1};
}

// ---------------------------------------------------------------------------
// Saturation

namespace {

struct SatElement {
    UniSeries p1, p2;
    std::map<std::size_t, Rat> combo;
    int o1 = kInf, o2 = kInf;
};

void primitivize(SatElement& e) {
    Int num_gcd = 0, den_lcm = 1;
    for (const UniSeries* s : {&e.p1, &e.p2})
        for (const auto& [ex, c] : s->terms()) {
            num_gcd = gcd(num_gcd, c.get_num());
            den_lcm = lcm(den_lcm, c.get_den());
        }
    if (num_gcd == 0) return;
    Rat f = rat(den_lcm, abs(num_gcd));
    if (f == 1) return;
    e.p1 = scale(e.p1, f);
    e.p2 = scale(e.p2, f);
    for (auto& [i, c] : e.combo) c *= f;
}

struct SaturationState {
    int rw1, rw2;  // raw-order windows
    std::vector<SatElement> basis;
    std::map<std::pair<int, int>, std::size_t> by_value;
    // fixed representative per single-component value; later elements sharing
    // the value resolve against it once (pairwise resolvents are spanned by
    // these, so all-pairs processing is unnecessary)
    std::map<int, std::size_t> col1, col2;
    struct Tie {
        std::size_t a, b;
        int comp;
    };
    std::vector<Tie> pending;

    void refresh_orders(SatElement& e) const {
        e.o1 = capped_order(e.p1, rw1);
        e.o2 = capped_order(e.p2, rw2);
    }

    void subtract(SatElement& e, const SatElement& r, int comp) {
        Rat lam = comp == 1 ? e.p1.coeff(e.o1) / r.p1.coeff(r.o1) : e.p2.coeff(e.o2) / r.p2.coeff(r.o2);
        add_scaled(e.p1, r.p1, -lam);
        add_scaled(e.p2, r.p2, -lam);
        for (const auto& [i, c] : r.combo) {
            auto [it, fresh] = e.combo.emplace(i, -lam * c);
            if (!fresh) {
                it->second -= lam * c;
                if (it->second == 0) e.combo.erase(it);
            }
        }
    }

    void insert(SatElement e) {
        for (;;) {
            refresh_orders(e);
            if (e.o1 == kInf && e.o2 == kInf) return;
            primitivize(e);
            auto it = by_value.find({e.o1, e.o2});
            if (it == by_value.end()) break;
            // same value pattern: reduce against the representative; the
            // reduced component strictly climbs, so this terminates
            subtract(e, basis[it->second], e.o1 != kInf ? 1 : 2);
        }
        std::size_t idx = basis.size();
        if (e.o1 != kInf && e.o1 < rw1) {
            auto [it, fresh] = col1.emplace(e.o1, idx);
            if (!fresh) pending.push_back({idx, it->second, 1});
        }
        if (e.o2 != kInf && e.o2 < rw2) {
            auto [it, fresh] = col2.emplace(e.o2, idx);
            if (!fresh) pending.push_back({idx, it->second, 2});
        }
        by_value[{e.o1, e.o2}] = idx;
        basis.push_back(std::move(e));
    }

    void run() {
        while (!pending.empty()) {
            Tie t = pending.back();
            pending.pop_back();
            SatElement u = basis[t.a];
            subtract(u, basis[t.b], t.comp);
            insert(std::move(u));
        }
    }
};

Witness combo_witness(const std::vector<SatGenerator>& gens, const std::map<std::size_t, Rat>& combo) {
    Witness w;
    w.kind = gens.empty() ? WitnessKind::OneForm : gens.front().label.kind;
    for (const auto& [i, c] : combo) {
        w.kind = gens[i].label.kind;
        w.form = add_form(w.form, scaled_form(gens[i].label.form, c));
    }
    return w;
}

}  // namespace

SetWithWitnesses saturate(const std::vector<SatGenerator>& gens, ValuePoint window, ValuePoint offset) {
    long rw1l = static_cast<long>(window.v1) - offset.v1;
    long rw2l = static_cast<long>(window.v2) - offset.v2;
    if (rw1l < 0 || rw2l < 0 || rw1l >= kExactTrunc || rw2l >= kExactTrunc)
        throw Error("saturate: bad window");
    SaturationState st{static_cast<int>(rw1l), static_cast<int>(rw2l), {}, {}, {}};
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].p1.trunc() < st.rw1 || gens[i].p2.trunc() < st.rw2)
            throw Error("saturate: window exceeds generator truncation margin");
        SatElement e;
        e.p1 = gens[i].p1.truncated(st.rw1);
        e.p2 = gens[i].p2.truncated(st.rw2);
        e.combo = {{i, Rat(1)}};
        st.insert(std::move(e));
    }
    st.run();

    // displayed-value certifiers: for each first coordinate the element with
    // the largest reachable second coordinate, and vice versa
    std::map<int, std::pair<int, std::size_t>> col;  // v1 -> (best v2, element)
    std::map<int, std::pair<int, std::size_t>> row;  // v2 -> (best v1, element)
    auto disp1 = [&](int o) { return o == kInf ? kInf : o + offset.v1; };
    auto disp2 = [&](int o) { return o == kInf ? kInf : o + offset.v2; };
    for (std::size_t i = 0; i < st.basis.size(); ++i) {
        const SatElement& e = st.basis[i];
        int d1 = disp1(e.o1), d2 = disp2(e.o2);
        if (d1 != kInf) {
            auto [it, fresh] = col.emplace(d1, std::make_pair(d2, i));
            if (!fresh && d2 > it->second.first) it->second = {d2, i};
        }
        if (d2 != kInf) {
            auto [it, fresh] = row.emplace(d2, std::make_pair(d1, i));
            if (!fresh && d1 > it->second.first) it->second = {d1, i};
        }
    }

    SetWithWitnesses out;
    out.set.window = window;
    for (const auto& [a, cbest] : col) {
        if (a < 0 || a > window.v1) continue;
        for (const auto& [b, rbest] : row) {
            if (b < 0 || b > window.v2) continue;
            if (cbest.first < b || rbest.first < a) continue;
            ValuePoint p{a, b};
            out.set.points.insert(p);
            // witness: the certifying element, or a verified generic pair sum
            const SatElement& g = st.basis[cbest.second];
            const SatElement& h = st.basis[rbest.second];
            int t1 = a - offset.v1, t2 = b - offset.v2;
            if (g.o1 == t1 && g.o2 == t2) {
                out.witnesses.emplace(p, combo_witness(gens, g.combo));
                continue;
            }
            bool found = false;
            for (long lam = 1; lam <= 8 && !found; ++lam) {
                UniSeries q1 = g.p1 + scale(h.p1, Rat(lam));
                UniSeries q2 = g.p2 + scale(h.p2, Rat(lam));
                if (capped_order(q1, st.rw1) != t1 || capped_order(q2, st.rw2) != t2) continue;
                std::map<std::size_t, Rat> combo = g.combo;
                for (const auto& [i, c] : h.combo) {
                    auto [it, fresh] = combo.emplace(i, Rat(lam) * c);
                    if (!fresh) {
                        it->second += Rat(lam) * c;
                        if (it->second == 0) combo.erase(it);
                    }
                }
                out.witnesses.emplace(p, combo_witness(gens, combo));
                found = true;
            }
            if (!found) throw Error("saturate: no witness combination found (internal)");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generator enumeration and the named value sets

namespace {

std::vector<SatGenerator> function_generators(const Bigerm& phi, int rw1, int rw2, int margin) {
    int ox1 = order_or_inf(phi.b1.x), oy1 = order_or_inf(phi.b1.y);
    int ox2 = order_or_inf(phi.b2.x), oy2 = order_or_inf(phi.b2.y);
    auto fits = [&](long a, long b) {
        return (a * ox1 + b * oy1 <= rw1 + margin) || (a * ox2 + b * oy2 <= rw2 + margin);
    };
    int t = effective_trunc(phi);
    std::vector<SatGenerator> gens;
    UniSeries xa1 = UniSeries::monomial(Var::t1, Rat(1), 0, t), xa2 = UniSeries::monomial(Var::t2, Rat(1), 0, t);
    for (int a = 0; fits(a, 0); ++a) {
        if (a > 0) {
            xa1 = (xa1 * phi.b1.x).truncated(t);
            xa2 = (xa2 * phi.b2.x).truncated(t);
        }
        UniSeries p1 = xa1, p2 = xa2;
        for (int b = 0; fits(a, b); ++b) {
            if (b > 0) {
                p1 = (p1 * phi.b1.y).truncated(t);
                p2 = (p2 * phi.b2.y).truncated(t);
            }
            if (a + b < 1) continue;
            SatGenerator g;
            g.label = Witness{WitnessKind::Function, Differential{BiPoly::monomial(Rat(1), a, b), BiPoly(), Rat(0)}};
            g.p1 = p1;
            g.p2 = p2;
            gens.push_back(std::move(g));
        }
    }
    return gens;
}

std::vector<SatGenerator> oneform_generators(const Bigerm& phi, int rw1, int rw2, int margin, int min_deg,
                                             bool include_ydy) {
    int ox1 = order_or_inf(phi.b1.x), oy1 = order_or_inf(phi.b1.y);
    int ox2 = order_or_inf(phi.b2.x), oy2 = order_or_inf(phi.b2.y);
    int t = effective_trunc(phi);
    UniSeries dx1 = derive(phi.b1.x), dy1 = derive(phi.b1.y);
    UniSeries dx2 = derive(phi.b2.x), dy2 = derive(phi.b2.y);
    std::vector<SatGenerator> gens;
    auto monomial_orders = [&](long a, long b, int which) {  // which: 0 = dx, 1 = dy
        long comp1 = which == 0 ? ox1 : oy1;
        long comp2 = which == 0 ? ox2 : oy2;
        long r1 = a * ox1 + b * oy1 + comp1 - 1;
        long r2 = a * ox2 + b * oy2 + comp2 - 1;
        return std::make_pair(r1, r2);
    };
    auto fits = [&](long a, long b, int which) {
        auto [r1, r2] = monomial_orders(a, b, which);
        return r1 <= rw1 + margin || r2 <= rw2 + margin;
    };
    for (int which = 0; which < 2; ++which) {
        UniSeries xa1 = UniSeries::monomial(Var::t1, Rat(1), 0, t), xa2 = UniSeries::monomial(Var::t2, Rat(1), 0, t);
        for (int a = 0; fits(a, 0, which); ++a) {
            if (a > 0) {
                xa1 = (xa1 * phi.b1.x).truncated(t);
                xa2 = (xa2 * phi.b2.x).truncated(t);
            }
            UniSeries p1 = xa1, p2 = xa2;
            for (int b = 0; fits(a, b, which); ++b) {
                if (b > 0) {
                    p1 = (p1 * phi.b1.y).truncated(t);
                    p2 = (p2 * phi.b2.y).truncated(t);
                }
                if (a + b < min_deg) continue;
                SatGenerator g;
                BiPoly mono = BiPoly::monomial(Rat(1), a, b);
                g.label = Witness{WitnessKind::OneForm,
                                  which == 0 ? Differential{mono, BiPoly(), Rat(0)} : Differential{BiPoly(), mono, Rat(0)}};
                g.p1 = (p1 * (which == 0 ? dx1 : dy1)).truncated(t);
                g.p2 = (p2 * (which == 0 ? dx2 : dy2)).truncated(t);
                gens.push_back(std::move(g));
            }
        }
    }
    if (include_ydy) {
        SatGenerator g;
        g.label = Witness{WitnessKind::OneForm, Differential{BiPoly(), BiPoly(), Rat(1)}};
        g.p1 = (phi.b1.y * dy1).truncated(t);
        g.p2 = (phi.b2.y * dy2).truncated(t);
        if (!g.p1.is_zero() || !g.p2.is_zero()) gens.push_back(std::move(g));
    }
    return gens;
}

void detect_conductor(ValueSet& v, int margin) {
    int b1 = v.window.v1, b2 = v.window.v2;
    if (b1 < 0 || b2 < 0) return;
    std::vector<std::vector<bool>> present(b1 + 2, std::vector<bool>(b2 + 2, false));
    for (const auto& p : v.points)
        if (p.v1 <= b1 && p.v2 <= b2) present[p.v1][p.v2] = true;
    // full[a][b]: every grid point of [a,b1] x [b,b2] lies in the set
    std::vector<std::vector<bool>> full(b1 + 2, std::vector<bool>(b2 + 2, true));
    for (int a = b1; a >= 0; --a)
        for (int b = b2; b >= 0; --b)
            full[a][b] = present[a][b] && full[a + 1][b] && full[a][b + 1];
    int ca = kInf, cb = kInf;
    bool any = false;
    for (int a = 0; a <= b1 - margin; ++a)
        for (int b = 0; b <= b2 - margin; ++b)
            if (full[a][b]) {
                any = true;
                ca = std::min(ca, a);
                cb = std::min(cb, b);
            }
    // the componentwise minimum of full corners is the unique conductor for
    // staircase sets; ambiguity means the window is too small
    if (any && ca <= b1 - margin && cb <= b2 - margin && full[ca][cb]) v.conductor = ValuePoint{ca, cb};
}

void require_window_margin(const Bigerm& phi, int rw1, int rw2, int margin, const char* who) {
    int t = effective_trunc(phi);
    if (t < std::max(rw1, rw2) + margin)
        throw Error(std::string(who) + ": window exceeds working truncation minus margin");
}

}  // namespace

SetWithWitnesses gamma_at(const Bigerm& phi, ValuePoint window) {
    int margin = phi.m1() + phi.m2();
    require_window_margin(phi, window.v1, window.v2, margin, "gamma");
    auto gens = function_generators(phi, window.v1, window.v2, margin);
    SetWithWitnesses out = saturate(gens, window, ValuePoint{0, 0});
    out.set.points.insert(ValuePoint{0, 0});
    out.witnesses.emplace(ValuePoint{0, 0},
                          Witness{WitnessKind::Function, Differential{BiPoly::monomial(Rat(1), 0, 0), BiPoly(), Rat(0)}});
    detect_conductor(out.set, margin);
    return out;
}

SetWithWitnesses lambda_at(const Bigerm& phi, ValuePoint window) {
    int margin = phi.m1() + phi.m2();
    require_window_margin(phi, window.v1 - 1, window.v2 - 1, margin, "lambda");
    auto gens = oneform_generators(phi, window.v1 - 1, window.v2 - 1, margin, 0, false);
    SetWithWitnesses out = saturate(gens, window, ValuePoint{1, 1});
    detect_conductor(out.set, margin);
    return out;
}

SetWithWitnesses lambda_delta_at(const Bigerm& phi, ValuePoint window) {
    if (!is_puiseux(phi)) throw Error("lambda_delta: bigerm must be in Puiseux form");
    int m1 = phi.m1(), m2 = phi.m2();
    int margin = m1 + m2;
    int rw1 = window.v1 + m1 - 1, rw2 = window.v2 + m2 - 1;
    require_window_margin(phi, rw1, rw2, margin, "lambda_delta");
    auto gens = oneform_generators(phi, rw1, rw2, margin, 2, phi.delta == 2);
    SetWithWitnesses out = saturate(gens, window, ValuePoint{1 - m1, 1 - m2});
    detect_conductor(out.set, margin);
    return out;
}

namespace {

int max_support_exp(const Bigerm& phi) {
    int m = 1;
    for (const UniSeries* s : {&phi.b1.x, &phi.b1.y, &phi.b2.x, &phi.b2.y})
        for (const auto& [e, c] : s->terms()) m = std::max(m, e);
    return m;
}

// Grows the window until the conductor appears, recomputes on the tight
// conductor-sized window, and optionally re-verifies on its double.
// `lead` converts the working truncation into the displayed window:
// window = t - margin + lead (0 for gamma, +1 for lambda, 1 - max(m) for the
// multiplicity-shifted set).
SetWithWitnesses adaptive_set(const Bigerm& phi, int lead,
                              const std::function<SetWithWitnesses(const Bigerm&, ValuePoint)>& compute, bool verify) {
    validate(phi);
    int margin = phi.m1() + phi.m2();
    int avail = effective_trunc(phi);
    int cap = std::min(truncation_cap(), avail >= kExactTrunc ? truncation_cap() : avail);
    auto at_window = [&](int w) {
        int t = std::min(w - lead + margin, cap);
        return compute(puiseux_normalize(at_trunc(phi, t)), ValuePoint{t - margin + lead, t - margin + lead});
    };
    int w = std::min(std::max(2 * margin + 4, max_support_exp(phi) / 2 + margin), cap - margin + lead);
    SetWithWitnesses last;
    bool have_last = false;
    for (int rounds = 0; rounds < 16; ++rounds) {
        if (w + margin - lead > cap) break;
        last = at_window(w);
        have_last = true;
        w = last.set.window.v1;
        if (last.set.conductor) {
            int wstar = std::max(last.set.conductor->v1, last.set.conductor->v2) + margin;
            if (wstar < w) {
                last = at_window(wstar);
                if (!last.set.conductor) {  // should not happen; fall back to the wide set
                    last = at_window(w);
                }
            }
            if (!verify) return last;
            int wide_w = 2 * std::max(last.set.window.v1, 1);
            if (wide_w - lead + margin > cap) return last;  // cannot widen; reported unverified
            SetWithWitnesses wide = at_window(wide_w);
            bool agree = wide.set.conductor == last.set.conductor;
            if (agree)
                for (const auto& q : wide.set.points)
                    if (q.v1 <= last.set.window.v1 && q.v2 <= last.set.window.v2 && !last.set.points.count(q))
                        agree = false;
            if (agree)
                for (const auto& q : last.set.points)
                    if (!wide.set.points.count(q)) agree = false;
            if (agree) {
                last.set.quadrant_verified = true;
                return last;
            }
            w = wide_w;  // the small window lied; keep growing
            continue;
        }
        w = 2 * std::max(w, 1);
    }
    if (!have_last || !last.set.conductor)
        throw Error("conductor not detected within the truncation cap; partial set has " +
                    std::to_string(have_last ? last.set.points.size() : 0) + " points");
    return last;
}

}  // namespace

SetWithWitnesses gamma(const Bigerm& phi) {
    return adaptive_set(phi, 0, [](const Bigerm& p, ValuePoint w) { return gamma_at(p, w); }, true);
}

SetWithWitnesses lambda(const Bigerm& phi) {
    return adaptive_set(phi, 1, [](const Bigerm& p, ValuePoint w) { return lambda_at(p, w); }, true);
}

SetWithWitnesses lambda_delta(const Bigerm& phi) {
    int lead = 1 - std::max(phi.m1(), phi.m2());
    return adaptive_set(phi, lead, [](const Bigerm& p, ValuePoint w) { return lambda_delta_at(p, w); }, true);
}

SetWithWitnesses gamma_unverified(const Bigerm& phi) {
    return adaptive_set(phi, 0, [](const Bigerm& p, ValuePoint w) { return gamma_at(p, w); }, false);
}

SetWithWitnesses lambda_unverified(const Bigerm& phi) {
    return adaptive_set(phi, 1, [](const Bigerm& p, ValuePoint w) { return lambda_at(p, w); }, false);
}

SetWithWitnesses lambda_delta_unverified(const Bigerm& phi) {
    int lead = 1 - std::max(phi.m1(), phi.m2());
    return adaptive_set(phi, lead, [](const Bigerm& p, ValuePoint w) { return lambda_delta_at(p, w); }, false);
}

std::set<int> branch_semigroup(const Branch& b, int* conductor_out) {
    int m = b.multiplicity();
    int avail = std::min(b.x.trunc(), b.y.trunc());
    int cap = std::min(truncation_cap(), avail);
    int t = std::min(8 * m + 8, cap);
    for (;;) {
        int w = t - m;
        std::map<int, UniSeries> echelon;
        int ox = order_or_inf(b.x), oy = order_or_inf(b.y);
        auto insert = [&](UniSeries s) {
            for (;;) {
                int o = capped_order(s, w);
                if (o == kInf) return;
                auto it = echelon.find(o);
                if (it == echelon.end()) {
                    echelon.emplace(o, std::move(s));
                    return;
                }
                s = s - scale(it->second, s.coeff(o) / it->second.coeff(o));
            }
        };
        UniSeries xa = UniSeries::monomial(b.var(), Rat(1), 0, t);
        for (long i = 0; i * ox <= w || i == 0; ++i) {
            if (i > 0) xa = (xa * b.x).truncated(t);
            UniSeries p = xa;
            for (long j = 0; i * ox + j * oy <= w; ++j) {
                if (j > 0) p = (p * b.y).truncated(t);
                if (i + j >= 1) insert(p);
            }
            if (ox >= kInf) break;
        }
        std::set<int> orders{0};
        for (const auto& [o, s] : echelon) orders.insert(o);
        int c = w + 1;
        while (c > 0 && orders.count(c - 1)) --c;
        if (c + m <= w) {
            if (conductor_out) *conductor_out = c;
            return {orders.begin(), orders.upper_bound(w)};
        }
        if (t >= cap) throw Error("branch_semigroup: conductor not found within the truncation cap");
        t = std::min(2 * t, cap);
    }
}

int intersection_multiplicity(const Bigerm& phi) {
    validate(phi);
    int avail = effective_trunc(phi);
    int cap = std::min(truncation_cap(), avail);
    int t = std::min(4 * (phi.m1() + phi.m2()) + 8, cap);
    for (;;) {
        Bigerm p = puiseux_normalize(at_trunc(phi, t));
        int m = p.m1();
        const UniSeries& y1 = p.b1.y;
        UniSeries x2 = retag(p.b2.x, Var::t2), y2 = retag(p.b2.y, Var::t2);
        // residue classes of y2 - y1(t) modulo t^m = x2: b_r collects the
        // exponents congruent to r
        std::vector<UniSeries> br(m, UniSeries::zero(Var::t2, t));
        br[0] = y2;
        std::vector<UniSeries> x2pow{UniSeries::monomial(Var::t2, Rat(1), 0, t)};
        auto x2p = [&](int k) -> const UniSeries& {
            while (static_cast<int>(x2pow.size()) <= k) x2pow.push_back((x2pow.back() * x2).truncated(t));
            return x2pow[k];
        };
        for (const auto& [e, c] : y1.terms()) br[e % m] = br[e % m] - scale(x2p(e / m), c);
        // multiplication matrix of the reduced series on the basis 1..t^{m-1}
        std::vector<std::vector<UniSeries>> mat(m, std::vector<UniSeries>(m, UniSeries::zero(Var::t2, t)));
        for (int j = 0; j < m; ++j)
            for (int r = 0; r < m; ++r) {
                int e = r + j;
                if (e < m)
                    mat[e][j] = mat[e][j] + br[r];
                else
                    mat[e - m][j] = mat[e - m][j] + (br[r] * x2).truncated(t);
            }
        std::function<UniSeries(std::vector<int>&, int)> det = [&](std::vector<int>& cols, int row) -> UniSeries {
            if (cols.empty()) return UniSeries::monomial(Var::t2, Rat(1), 0, t);
            UniSeries acc = UniSeries::zero(Var::t2, t);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                int cj = cols[k];
                std::vector<int> rest;
                for (std::size_t l = 0; l < cols.size(); ++l)
                    if (l != k) rest.push_back(cols[l]);
                UniSeries sub = det(rest, row + 1);
                UniSeries term = (mat[row][cj] * sub).truncated(t);
                acc = k % 2 == 0 ? acc + term : acc - term;
            }
            return acc;
        };
        std::vector<int> cols(m);
        for (int j = 0; j < m; ++j) cols[j] = j;
        UniSeries d = det(cols, 0);
        auto o = d.order();
        if (o && *o <= d.trunc()) return *o;
        if (t >= cap) throw Error("intersection_multiplicity: truncation too small to resolve");
        t = std::min(2 * t, cap);
    }
}

std::set<ValuePoint> fiber(const ValueSet& v, int i, ValuePoint p) {
    if (i != 1 && i != 2) throw Error("fiber: branch index must be 1 or 2");
    if (p.v1 < 0 || p.v2 < 0 || p.v1 > v.window.v1 || p.v2 > v.window.v2)
        throw Error("fiber: point outside the reliable window");
    std::set<ValuePoint> out;
    for (const auto& q : v.points) {
        if (i == 1 && q.v1 == p.v1 && q.v2 > p.v2) out.insert(q);
        if (i == 2 && q.v2 == p.v2 && q.v1 > p.v1) out.insert(q);
    }
    return out;
}

std::set<ValuePoint> maximal_points(const ValueSet& v) {
    if (!v.conductor) throw Error("maximal_points: conductor not detected");
    std::set<ValuePoint> out;
    for (const auto& p : v.points) {
        if (p.v1 > v.conductor->v1 || p.v2 > v.conductor->v2) continue;
        if (fiber(v, 1, p).empty() && fiber(v, 2, p).empty()) out.insert(p);
    }
    return out;
}

bool property_a_holds(const ValueSet& v) {
    for (const auto& a : v.points)
        for (const auto& b : v.points)
            if (a.v1 < b.v1 && a.v2 > b.v2 && !v.points.count(ValuePoint{a.v1, b.v2})) return false;
    return true;
}

bool property_b_holds(const ValueSet& v) {
    auto check_axis = [&](bool first) {
        for (const auto& a : v.points)
            for (const auto& b : v.points) {
                int ka = first ? a.v1 : a.v2, kb = first ? b.v1 : b.v2;
                int oa = first ? a.v2 : a.v1, ob = first ? b.v2 : b.v1;
                if (ka != kb || oa >= ob) continue;
                bool found = false;
                for (const auto& w : v.points) {
                    int kw = first ? w.v1 : w.v2, ow = first ? w.v2 : w.v1;
                    if (kw > ka && ow == oa) {
                        found = true;
                        break;
                    }
                }
                if (found) continue;
                // witnesses beyond the window cannot be decided; only points
                // below the conductor line are conclusive
                if (v.conductor && ka < (first ? v.conductor->v1 : v.conductor->v2)) return false;
            }
        return true;
    };
    return check_axis(true) && check_axis(false);
}

BigermInvariants compute_invariants(const Bigerm& input) {
    validate(input);
    BigermInvariants inv;
    auto g = gamma(input);
    if (!g.set.conductor) throw Error("compute_invariants: gamma conductor not detected");
    auto ld0 = lambda_delta(input);
    if (!ld0.set.conductor) throw Error("compute_invariants: differential value set conductor not detected");
    int m1 = input.b1.multiplicity(), m2 = input.b2.multiplicity();
    int c = std::max(g.set.conductor->v1, g.set.conductor->v2);
    int cld = std::max(ld0.set.conductor->v1, ld0.set.conductor->v2);
    int margin = m1 + m2;
    int wld = std::max(c, cld) + margin;
    int t = std::max(c + margin, wld + std::max(m1, m2) - 1) + margin + 2;
    int avail = effective_trunc(input);
    if (t > avail)
        throw Error("compute_invariants: input truncation too small for the detected conductor");
    Bigerm phi = puiseux_normalize(at_trunc(input, t));
    inv.normalized = phi;
    inv.conductor_max = c;
    inv.spec_trunc = c + margin;
    ValuePoint w{c + margin, c + margin};
    auto gg = gamma_at(phi, w);
    gg.set.quadrant_verified = g.set.quadrant_verified;
    inv.gamma = gg.set;
    inv.gamma_w = std::move(gg.witnesses);
    auto ll = lambda_at(phi, w);
    inv.lambda = ll.set;
    inv.lambda_w = std::move(ll.witnesses);
    auto ld = lambda_delta_at(phi, ValuePoint{wld, wld});
    ld.set.quadrant_verified = ld0.set.quadrant_verified;
    inv.lambda_delta = ld.set;
    inv.lambda_delta_w = std::move(ld.witnesses);
    return inv;
}

int truncation_cap() {
    if (const char* env = std::getenv("BIGERM_TRUNCATION_CAP")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 512;
}

}  // namespace bigerm
