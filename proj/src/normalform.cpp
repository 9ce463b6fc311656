#include "bigerm/normalform.hpp"

#include <algorithm>

namespace bigerm {

namespace {

Bigerm at_trunc(const Bigerm& phi, int t) {
    Bigerm r = phi;
    r.trunc = t;
    return r;
}

std::optional<ValuePoint> shifted_value(const Differential& omega, const Bigerm& phi) {
    auto v = value_of_differential(omega, phi);
    if (std::holds_alternative<BranchVanishing>(v)) return std::nullopt;
    ValuePoint p = std::get<ValuePoint>(v);
    return ValuePoint{p.v1 - phi.m1(), p.v2 - phi.m2()};
}

}  // namespace

RemovableExponents removable_exponents(const ValueSet& lds, int m1, int m2, int delta) {
    (void)delta;
    if (!lds.conductor) throw Error("removable_exponents: conductor of the differential value set not detected");
    std::set<ValuePoint> maximal = maximal_points(lds);
    RemovableExponents out;
    int top = std::min(lds.window.v1, lds.window.v2);
    for (int k = 1; k <= top; ++k) {
        ValuePoint diag{k, k};
        if (k > m1 && (!fiber(lds, 1, diag).empty() || maximal.count(diag))) out.branch1.insert(k);
        if (k > m2 && !fiber(lds, 2, diag).empty()) out.branch2.insert(k);
    }
    return out;
}

TangentCorrection correction_from_witness(const Differential& omega, const Bigerm& phi, int k) {
    if (phi.delta == 1 && omega.beta != 0)
        throw Error("correction_from_witness: y dy term is not allowed in the distinct-tangent case");
    if (auto d1 = omega.eta1.min_degree(); d1 && *d1 < 2)
        throw Error("correction_from_witness: dx part must lie in the square of the maximal ideal");
    if (auto d2 = omega.eta2.min_degree(); d2 && *d2 < 2)
        throw Error("correction_from_witness: dy part must lie in the square of the maximal ideal");
    int m1 = phi.m1(), m2 = phi.m2();
    TangentCorrection corr;
    corr.k = k;
    // omega = g2 dx + g1 dy with g1 = beta (delta-1) y + eta2, g2 = eta1
    auto g1_at = [&](const Branch& b) {
        UniSeries s = compose_bipoly(omega.eta2, b.x, b.y);
        if (phi.delta == 2 && omega.beta != 0) s = s + scale(b.y, omega.beta);
        return s.truncated(phi.trunc);
    };
    auto g2_at = [&](const Branch& b) { return compose_bipoly(omega.eta1, b.x, b.y).truncated(phi.trunc); };
    try {
        corr.eps1 = divide_monomial(g1_at(phi.b1), Rat(m1), m1 - 1);
        corr.eps2 = phi.delta == 1 ? divide_monomial(scale(g2_at(phi.b2), Rat(-1)), Rat(m2), m2 - 1)
                                   : divide_monomial(g1_at(phi.b2), Rat(m2), m2 - 1);
    } catch (const Error& e) {
        throw Error(std::string("correction_from_witness: non-exact division (form outside the allowed module "
                                "or truncation shortfall): ") +
                    e.what());
    }
    corr.eta1 = -omega.eta2;
    corr.eta2 = omega.eta1;
    corr.beta = -omega.beta;
    return corr;
}

namespace {

// The actual group element for a scaled correction: rho_i = exp(-d eps_i d/dt)
// and sigma the time-1 flow of d (eta1 + beta y) d/dx + d eta2 d/dy. Applying
// it shifts phi by d times the correction's tangent vector with all other
// terms landing strictly above order k.
GroupElement correction_flow(const TangentCorrection& corr, const Rat& d, int delta, int trunc, int deg_bound) {
    GroupElement g;
    g.rho1 = flow_reparametrization(scale(corr.eps1, -d).truncated(trunc));
    g.rho2 = flow_reparametrization(scale(corr.eps2, -d).truncated(trunc));
    BiPoly ex = scale(corr.eta1, d).truncated(deg_bound);
    if (delta == 2 && corr.beta != 0) ex = ex + BiPoly::monomial(d * corr.beta, 0, 1, deg_bound);
    BiPoly ey = scale(corr.eta2, d).truncated(deg_bound);
    auto [sx, sy] = flow_plane_automorphism(ex, ey, deg_bound);
    g.sigma_x = sx;
    g.sigma_y = sy;
    g.cls = delta == 2 ? GroupClass::ATilde1 : GroupClass::A1;
    return g;
}

const Differential* find_witness(const WitnessTable& table, const Bigerm& phi, int branch, int k) {
    // branch 1 wants shifted value (k, > k), falling back to the maximal
    // diagonal (k, k); branch 2 wants (> k, k) strictly.
    const Differential* diagonal = nullptr;
    for (const auto& [p, w] : table) {
        if (w.kind != WitnessKind::OneForm) continue;
        if (branch == 1 && p.v1 == k) {
            if (p.v2 > k) {
                auto v = shifted_value(w.form, phi);
                if (v && v->v1 == k && v->v2 > k) return &w.form;
            } else if (p.v2 == k) {
                diagonal = &w.form;
            }
        }
        if (branch == 2 && p.v2 == k && p.v1 > k) {
            auto v = shifted_value(w.form, phi);
            if (v && v->v2 == k && v->v1 > k) return &w.form;
        }
    }
    if (branch == 1 && diagonal) {
        auto v = shifted_value(*diagonal, phi);
        if (v && v->v1 == k && v->v2 >= k) return diagonal;
    }
    return nullptr;
}

}  // namespace

Bigerm eliminate_term(const Bigerm& phi, int branch, int k, const WitnessTable& table) {
    if (!is_puiseux(phi)) throw Error("eliminate_term: bigerm must be in Puiseux form");
    Bigerm cur = phi;
    int mi = branch == 1 ? phi.m1() : phi.m2();
    if (k <= mi) throw Error("eliminate_term: order must exceed the branch multiplicity");
    for (int round = 0;; ++round) {
        Rat a = cur.free_comp(branch).coeff(k);
        if (a == 0) return cur;
        if (round >= 4) throw Error("eliminate_term: failure to climb (witness did not cancel the term)");
        const Differential* omega = find_witness(table, cur, branch, k);
        if (!omega) throw Error("eliminate_term: witness missing for order " + std::to_string(k) + " on branch " +
                                std::to_string(branch));
        TangentCorrection corr = correction_from_witness(*omega, cur, k);
        // leading coefficient of h_i = omega(phi_i) / (m_i t^{m_i - 1})
        UniSeries h = divide_monomial(differential_pullback(*omega, cur, branch), Rat(branch == 1 ? cur.m1() : cur.m2()),
                                      (branch == 1 ? cur.m1() : cur.m2()) - 1);
        Rat c = h.coeff(k);
        if (c == 0) throw Error("eliminate_term: witness value drifted (internal)");
        // induced change at order k: branch 1 sees +h1, branch 2 sees
        // (-1)^delta h2 in its free component
        if (branch == 2 && cur.delta == 1) c = -c;
        Rat d = -a / c;
        GroupElement g = correction_flow(corr, d, cur.delta, cur.trunc, cur.trunc + 1);
        Bigerm next = puiseux_normalize(apply(g, cur));
        // lower jets must be untouched and the target coefficient must vanish
        for (int b = 1; b <= 2; ++b)
            for (const auto& [e, cc] : next.free_comp(b).terms()) {
                if (e >= k) break;
                if (cc != cur.free_comp(b).coeff(e))
                    throw Error("eliminate_term: lower jet disturbed at order " + std::to_string(e));
            }
        for (int b = 1; b <= 2; ++b)
            for (const auto& [e, cc] : cur.free_comp(b).terms()) {
                if (e >= k) break;
                if (cc != next.free_comp(b).coeff(e))
                    throw Error("eliminate_term: lower jet lost at order " + std::to_string(e));
            }
        cur = next;
    }
}

namespace {

struct ReductionResult {
    Bigerm reduced;
    ValueSet gamma_set;
    ValueSet ld_set;
    WitnessTable gamma_w;
    int conductor_max = 0;
};

ReductionResult reduce_core(const Bigerm& input) {
    validate(input);
    auto g = gamma_unverified(input);
    if (!g.set.conductor) throw Error("reduce: gamma conductor not detected");
    // the shifted differential set has its own conductor, possibly beyond the
    // semigroup one; let the adaptive computation find it
    auto ld0 = lambda_delta_unverified(input);
    if (!ld0.set.conductor) throw Error("reduce: differential value set conductor not detected");
    int m1 = input.b1.multiplicity(), m2 = input.b2.multiplicity();
    int margin = m1 + m2;
    int c = std::max(g.set.conductor->v1, g.set.conductor->v2);
    int cld = std::max(ld0.set.conductor->v1, ld0.set.conductor->v2);
    int wld = std::max(c, cld) + margin;
    int t = std::max(c + margin, wld + std::max(m1, m2) - 1) + margin + 2;
    if (t > std::min({input.b1.x.trunc(), input.b1.y.trunc(), input.b2.x.trunc(), input.b2.y.trunc()}))
        throw Error("reduce: input truncation too small for the detected conductor");
    Bigerm phi = puiseux_normalize(at_trunc(input, t));
    ValuePoint w{wld, wld};
    auto gam = gamma_at(phi, ValuePoint{c + margin, c + margin});
    gam.set.quadrant_verified = g.set.quadrant_verified;
    auto ld = lambda_delta_at(phi, w);
    if (!ld.set.conductor) throw Error("reduce: differential value set conductor lost on the working window");
    RemovableExponents rem = removable_exponents(ld.set, m1, m2, phi.delta);

    Bigerm cur = phi;
    WitnessTable table = ld.witnesses;
    bool table_fresh = true;
    for (int k = std::min(m1, m2) + 1; k <= c - 1; ++k) {
        for (int branch : {1, 2}) {
            if (k <= (branch == 1 ? m1 : m2)) continue;
            const auto& rset = branch == 1 ? rem.branch1 : rem.branch2;
            if (!rset.count(k)) continue;
            if (cur.free_comp(branch).coeff(k) == 0) continue;
            try {
                cur = eliminate_term(cur, branch, k, table);
                table_fresh = false;
            } catch (const Error&) {
                if (table_fresh) throw;
                // witnesses drifted under the accumulated action: re-saturate
                auto ld2 = lambda_delta_at(cur, w);
                if (ld2.set.points != ld.set.points)
                    throw Error("reduce: differential value set changed during reduction (invariance violated)");
                table = std::move(ld2.witnesses);
                table_fresh = true;
                cur = eliminate_term(cur, branch, k, table);
                table_fresh = false;
            }
        }
    }
    cur = truncate_bigerm(cur, c - 1);
    validate(cur);
    ReductionResult out;
    out.reduced = cur;
    out.gamma_set = gam.set;
    out.gamma_w = std::move(gam.witnesses);
    out.ld_set = ld.set;
    out.conductor_max = c;
    return out;
}

}  // namespace

Bigerm reduce_A_delta(const Bigerm& phi) { return reduce_core(phi).reduced; }

namespace {

// Linear algebra over Q for the pivot system (few rows, 2-3 unknowns).
using Mat = std::vector<std::vector<Rat>>;

int rank_of(Mat m) {
    int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    int cols = static_cast<int>(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c] / m[r][c];
            for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

// Solves prod_j z_j^{E[r][j]} = target_r for rational z when possible.
// Returns nullopt when some needed root is irrational.
std::optional<std::vector<Rat>> solve_multiplicative(const Mat& expo, const std::vector<Rat>& targets, int cols) {
    int rows = static_cast<int>(expo.size());
    if (rows == 0) return std::vector<Rat>(cols, Rat(1));
    // Gaussian elimination on the exponent matrix carrying multiplicative
    // row operations on the targets: z^(A) = t with A row-reduced.
    Mat a = expo;
    std::vector<Rat> t = targets;
    std::vector<int> pivot_col(rows, -1);
    int r = 0;
    auto pow_exact = [](const Rat& base, const Rat& e) -> std::optional<Rat> {
        // base^(p/q) over Q
        long p = 0, q = 1;
        if (!e.get_num().fits_slong_p() || !e.get_den().fits_slong_p()) return std::nullopt;
        p = e.get_num().get_si();
        q = e.get_den().get_si();
        Rat powed = pow_rat(base, p);
        return nth_root_rat(powed, q);
    };
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[r], a[piv]);
        std::swap(t[r], t[piv]);
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rat f = a[i][c] / a[r][c];
            for (int j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            auto scaled = pow_exact(t[r], f);
            if (!scaled || *scaled == 0) return std::nullopt;
            t[i] /= *scaled;
        }
        pivot_col[r] = c;
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (t[i] != 1) return std::nullopt;  // inconsistent (should be caught by rank check)
    std::vector<Rat> z(cols, Rat(1));
    for (int i = 0; i < r; ++i) {
        int c = pivot_col[i];
        // z_c^{a[i][c]} = t[i] with the other variables already fixed to 1
        auto root = pow_exact(t[i], 1 / a[i][c]);
        if (!root) return std::nullopt;
        z[c] = *root;
    }
    // verify (free variables were set to 1)
    for (int i = 0; i < rows; ++i) {
        Rat prod(1);
        for (int j = 0; j < cols; ++j) {
            if (expo[i][j] == 0) continue;
            if (!expo[i][j].get_num().fits_slong_p() || expo[i][j].get_den() != 1) return std::nullopt;
            prod *= pow_rat(z[j], expo[i][j].get_num().get_si());
        }
        if (prod != targets[i]) return std::nullopt;
    }
    return z;
}

struct PivotSystem {
    Mat rows;                  // exponent rows over (lambda1, lambda2[, alpha2])
    std::vector<Rat> targets;  // required values
};

// Exponent row of the homothety action on a surviving coefficient.
std::vector<Rat> action_row(int delta, int m1, int m2, int branch, int exp) {
    if (delta == 1) {
        // branch 1: alpha2 lambda1^{-j} with alpha2 = lambda2^{m2}
        // branch 2: alpha1 lambda2^{-j} with alpha1 = lambda1^{m1}
        if (branch == 1) return {Rat(-exp), Rat(m2)};
        return {Rat(m1), Rat(-exp)};
    }
    // delta = 2: unknowns (lambda1, lambda2, alpha2); x-compat handled by an
    // extra row lambda1^{m1} = lambda2^{m2}
    if (branch == 1) return {Rat(-exp), Rat(0), Rat(1)};
    return {Rat(0), Rat(-exp), Rat(1)};
}

}  // namespace

NormalForm homothety_normalize(const Bigerm& reduced, const ValueSet& gamma_set, const ValueSet& lds, int conductor_max) {
    NormalForm nf;
    nf.reduced = reduced;
    nf.gamma = gamma_set;
    nf.lambda_delta = lds;
    nf.conductor_max = conductor_max;
    int m1 = reduced.m1(), m2 = reduced.m2();
    int delta = reduced.delta;

    std::vector<SurvivingTerm> terms;
    for (int b : {1, 2})
        for (const auto& [e, c] : reduced.free_comp(b).terms()) terms.push_back({b, e, c, TermFlag::Kept});

    // pivot precedence: lowest surviving exponents of branch 1, then branch 2
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].branch == 1) order.push_back(i);
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].branch == 2) order.push_back(i);

    std::vector<std::size_t> pivots;
    Mat base;  // compat rows
    std::vector<Rat> base_t;
    if (delta == 2) {
        base.push_back({Rat(m1), Rat(-m2), Rat(0)});
        base_t.push_back(Rat(1));
    }
    for (std::size_t idx : order) {
        if (pivots.size() == 2) break;
        Mat trial = base;
        for (std::size_t p : pivots) trial.push_back(action_row(delta, m1, m2, terms[p].branch, terms[p].exp));
        trial.push_back(action_row(delta, m1, m2, terms[idx].branch, terms[idx].exp));
        if (rank_of(trial) == static_cast<int>(trial.size())) pivots.push_back(idx);
        // dependent rows (e.g. equal weight on both branches) stay parameters
    }

    PivotSystem sys;
    sys.rows = base;
    sys.targets = base_t;
    for (std::size_t p : pivots) {
        sys.rows.push_back(action_row(delta, m1, m2, terms[p].branch, terms[p].exp));
        sys.targets.push_back(1 / terms[p].coeff);
    }
    auto z = solve_multiplicative(sys.rows, sys.targets, delta == 1 ? 2 : 3);
    if (z) {
        // realize the homothety exactly: rescale every coefficient
        const std::vector<Rat>& zz = *z;
        for (auto& tm : terms) {
            std::vector<Rat> row = action_row(delta, m1, m2, tm.branch, tm.exp);
            Rat f(1);
            for (std::size_t j = 0; j < row.size(); ++j) f *= pow_rat(zz[j], row[j].get_num().get_si());
            tm.coeff *= f;
        }
        for (std::size_t p : pivots) {
            if (terms[p].coeff != 1) throw Error("homothety_normalize: pivot scaling failed (internal)");
            terms[p].flag = TermFlag::Pivot;
        }
        // write the rescaled coefficients back into the bigerm
        Bigerm scaled = reduced;
        for (int b : {1, 2}) {
            UniSeries fresh = UniSeries::zero(scaled.free_comp(b).var(), scaled.free_comp(b).trunc());
            for (const auto& tm : terms)
                if (tm.branch == b) fresh.set_coeff(tm.exp, tm.coeff);
            scaled.free_comp_mut(b) = fresh;
        }
        nf.reduced = scaled;
    } else {
        for (std::size_t p : pivots) terms[p].flag = TermFlag::PendingScale;
    }
    nf.terms = terms;

    // distinguished exponents
    int count1 = 0, count2 = 0;
    std::optional<int> j1, j2;
    for (const auto& tm : terms) {
        (tm.branch == 1 ? count1 : count2)++;
        if (tm.branch == 1 && (!j1 || tm.exp < *j1)) j1 = tm.exp;
        if (tm.branch == 2 && (!j2 || tm.exp < *j2)) j2 = tm.exp;
    }
    nf.j1 = j1;
    nf.j2 = j2;
    if (pivots.size() == 2 && !(count1 == 1 && count2 == 1)) nf.k = terms[pivots[1]].exp;
    nf.mirrored = count1 == 0 && count2 >= 1;
    nf.case_label = classify(nf);
    return nf;
}

std::string classify(const NormalForm& nf) {
    int count1 = 0, count2 = 0;
    for (const auto& tm : nf.terms) (tm.branch == 1 ? count1 : count2)++;
    int delta = nf.reduced.delta;
    int m1 = nf.reduced.m1(), m2 = nf.reduced.m2();
    bool mirrored = count1 == 0 && count2 >= 1;
    int a = mirrored ? count2 : count1;
    int b = mirrored ? count1 : count2;
    std::string label;
    if (a == 0 && b == 0)
        label = delta == 1 ? "d" : "";  // same-tangent smooth pair is excluded by distinctness
    else if (a >= 2 || (a == 1 && b >= 2))
        label = "a";
    else if (a == 1 && b == 1) {
        if (delta == 2 && m1 == m2 && nf.j1 && nf.j2 && *nf.j1 == *nf.j2)
            label = "c";  // primed below: the one-pivot family with a free ratio
        else
            label = "b";
    } else if (a == 1 && b == 0) {
        // the other branch is a coordinate axis
        bool axis_smooth = (mirrored ? m1 : m2) == 1;
        if (!axis_smooth) throw Error("classify: impossible shape (degenerate branch with multiplicity > 1)");
        label = delta == 1 ? "c" : "d";
    }
    if (label.empty()) throw Error("classify: shape matches no case of the classification");
    if (delta == 2) label += "'";
    return label;
}

NormalForm normal_form(const Bigerm& input) {
    ReductionResult red = reduce_core(input);
    return homothety_normalize(red.reduced, red.gamma_set, red.ld_set, red.conductor_max);
}

}  // namespace bigerm
