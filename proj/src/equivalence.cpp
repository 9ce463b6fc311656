#include "bigerm/equivalence.hpp"

#include <algorithm>

namespace bigerm {

namespace {

std::vector<Int> action_exponents(int delta, int m1, int m2, int branch, int exp) {
    if (delta == 1) {
        if (branch == 1) return {Int(-exp), Int(m2)};
        return {Int(m1), Int(-exp)};
    }
    if (branch == 1) return {Int(-exp), Int(0), Int(1)};
    return {Int(0), Int(-exp), Int(1)};
}

std::map<int, Rat> branch_terms(const NormalForm& nf, int branch) {
    std::map<int, Rat> out;
    for (const auto& tm : nf.terms)
        if (tm.branch == branch) out.emplace(tm.exp, tm.coeff);
    return out;
}

}  // namespace

ConstraintsOrMismatch homothety_constraints(const NormalForm& a, const NormalForm& b) {
    if (a.reduced.delta != b.reduced.delta) return ShapeMismatch{"tangency case differs"};
    if (a.case_label != b.case_label) return ShapeMismatch{"case label differs"};
    if (a.mirrored != b.mirrored) return ShapeMismatch{"branch roles differ"};
    int m1 = a.reduced.m1(), m2 = a.reduced.m2();
    if (m1 != b.reduced.m1() || m2 != b.reduced.m2()) return ShapeMismatch{"multiplicities differ"};
    if (a.j1 != b.j1 || a.j2 != b.j2 || a.k != b.k) return ShapeMismatch{"distinguished exponents differ"};
    int delta = a.reduced.delta;
    std::vector<MultiplicativeConstraint> cs;
    if (delta == 2) cs.push_back({{Int(m1), Int(-m2), Int(0)}, Rat(1)});
    for (int branch : {1, 2}) {
        auto ta = branch_terms(a, branch), tb = branch_terms(b, branch);
        auto ita = ta.begin();
        auto itb = tb.begin();
        for (; ita != ta.end() && itb != tb.end(); ++ita, ++itb) {
            if (ita->first != itb->first) return ShapeMismatch{"surviving supports differ"};
            cs.push_back({action_exponents(delta, m1, m2, branch, ita->first), itb->second / ita->second});
        }
        if (ita != ta.end() || itb != tb.end()) return ShapeMismatch{"surviving supports differ"};
    }
    return cs;
}

namespace {

// Basis of the saturated left kernel {n : sum_k n_k e_k = 0} of the rows,
// via integer row reduction with a unimodular transform.
std::vector<std::vector<Int>> integer_left_kernel(const std::vector<std::vector<Int>>& rows) {
    std::size_t k = rows.size();
    if (k == 0) return {};
    std::size_t d = rows[0].size();
    std::vector<std::vector<Int>> a = rows;
    std::vector<std::vector<Int>> u(k, std::vector<Int>(k, 0));
    for (std::size_t i = 0; i < k; ++i) u[i][i] = 1;
    std::size_t top = 0;
    for (std::size_t col = 0; col < d && top < k; ++col) {
        // Euclid on the column entries below `top`
        for (;;) {
            std::size_t nonzero = 0, smallest = top;
            Int best = 0;
            for (std::size_t i = top; i < k; ++i)
                if (a[i][col] != 0) {
                    ++nonzero;
                    if (best == 0 || abs(a[i][col]) < abs(best)) {
                        best = a[i][col];
                        smallest = i;
                    }
                }
            if (nonzero == 0) break;
            std::swap(a[top], a[smallest]);
            std::swap(u[top], u[smallest]);
            if (nonzero == 1) {
                ++top;
                break;
            }
            for (std::size_t i = top + 1; i < k; ++i) {
                if (a[i][col] == 0) continue;
                Int q = a[i][col] / a[top][col];  // truncated division keeps it integral
                for (std::size_t j = 0; j < d; ++j) a[i][j] -= q * a[top][j];
                for (std::size_t j = 0; j < k; ++j) u[i][j] -= q * u[top][j];
            }
        }
    }
    std::vector<std::vector<Int>> kernel;
    for (std::size_t i = 0; i < k; ++i) {
        bool zero = true;
        for (std::size_t j = 0; j < d; ++j)
            if (a[i][j] != 0) {
                zero = false;
                break;
            }
        if (zero) kernel.push_back(u[i]);
    }
    return kernel;
}

Rat pow_rat_big(const Rat& base, const Int& e) {
    if (!e.fits_slong_p()) throw Error("constraint exponent too large");
    return pow_rat(base, e.get_si());
}

}  // namespace

bool solvable_over_C(const std::vector<MultiplicativeConstraint>& constraints) {
    if (constraints.empty()) return true;
    std::vector<std::vector<Int>> rows;
    for (const auto& c : constraints) {
        if (c.ratio == 0) throw Error("solvable_over_C: zero ratio");
        rows.push_back(c.exponents);
    }
    for (const auto& n : integer_left_kernel(rows)) {
        Rat prod(1);
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (n[i] == 0) continue;
            prod *= pow_rat_big(constraints[i].ratio, n[i]);
        }
        if (prod != 1) return false;
    }
    return true;
}

namespace {

bool sets_match(const ValueSet& a, const ValueSet& b) {
    if (!a.conductor || !b.conductor) throw Error("value set comparison without detected conductors");
    if (*a.conductor != *b.conductor) return false;
    ValuePoint common{std::min(a.window.v1, b.window.v1), std::min(a.window.v2, b.window.v2)};
    auto below = [&](const ValueSet& v) {
        std::set<ValuePoint> s;
        for (const auto& p : v.points)
            if (p.v1 <= common.v1 && p.v2 <= common.v2) s.insert(p);
        return s;
    };
    return below(a) == below(b);
}

}  // namespace

Verdict decide_equivalence(const Bigerm& phi, const Bigerm& psi) {
    validate(phi);
    validate(psi);
    Verdict verdict;
    if (phi.delta != psi.delta) {
        verdict.detail = "tangency case differs";
        return verdict;
    }
    std::multiset<int> mphi{phi.m1(), phi.m2()}, mpsi{psi.m1(), psi.m2()};
    if (mphi != mpsi) {
        verdict.detail = "multiplicity multisets differ";
        return verdict;
    }
    auto gamma_phi = gamma_unverified(phi);
    auto ld_phi = lambda_delta_unverified(phi);
    std::optional<NormalForm> nf_phi;
    for (const char* order : {"as-given", "swapped"}) {
        Bigerm cand = order == std::string("as-given") ? psi : swap_branches(psi);
        if (phi.m1() != cand.b1.multiplicity() || phi.m2() != cand.b2.multiplicity()) continue;
        auto gamma_psi = gamma_unverified(cand);
        if (!sets_match(gamma_phi.set, gamma_psi.set)) continue;
        auto ld_psi = lambda_delta_unverified(cand);
        if (!sets_match(ld_phi.set, ld_psi.set)) continue;
        if (!nf_phi) nf_phi = normal_form(phi);
        NormalForm nf_psi = normal_form(cand);
        auto cs = homothety_constraints(*nf_phi, nf_psi);
        if (std::holds_alternative<ShapeMismatch>(cs)) {
            verdict.detail = std::get<ShapeMismatch>(cs).reason;
            continue;
        }
        auto& constraints = std::get<std::vector<MultiplicativeConstraint>>(cs);
        verdict.constraints = constraints;
        if (solvable_over_C(constraints)) {
            verdict.equivalent = true;
            verdict.branch_order = order;
            verdict.case_label = nf_phi->case_label;
            verdict.detail = "homothety constraint system solvable";
            return verdict;
        }
        verdict.detail = "homothety constraint system unsolvable";
    }
    if (verdict.detail.empty()) verdict.detail = "invariants differ";
    return verdict;
}

}  // namespace bigerm
