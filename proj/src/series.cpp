#include "bigerm/series.hpp"

#include <algorithm>
#include <sstream>

namespace bigerm {

int trunc_add(int a, int b) {
    long s = static_cast<long>(a) + static_cast<long>(b);
    if (s >= kExactTrunc) return kExactTrunc;
    if (s < 0) return 0;
    return static_cast<int>(s);
}

namespace {

// Order lower bound used in truncation bookkeeping: a series that is zero up
// to its truncation contributes "trunc + 1".
int order_floor(const UniSeries& s) {
    auto o = s.order();
    return o ? *o : trunc_add(s.trunc(), 1);
}

int min_degree_floor(const BiPoly& p) {
    auto d = p.min_degree();
    return d ? *d : trunc_add(p.deg_bound(), 1);
}

void require_same_var(const UniSeries& a, const UniSeries& b, const char* op) {
    if (a.var() != b.var())
        throw Error(std::string(op) + ": variable tag mismatch (" + var_name(a.var()) + " vs " + var_name(b.var()) + ")");
}

}  // namespace

UniSeries UniSeries::monomial(Var v, const Rat& c, int exp, int trunc) {
    UniSeries s(v, trunc);
    s.set_coeff(exp, c);
    return s;
}

std::optional<int> UniSeries::order() const {
    if (coef_.empty()) return std::nullopt;
    return coef_.begin()->first;
}

int UniSeries::order_or_throw(const char* what) const {
    auto o = order();
    if (!o) throw Error(std::string(what) + ": series vanishes up to truncation");
    return *o;
}

Rat UniSeries::coeff(int exp) const {
    auto it = coef_.find(exp);
    return it == coef_.end() ? Rat(0) : it->second;
}

Rat UniSeries::leading_coeff() const {
    if (coef_.empty()) throw Error("leading_coeff of zero series");
    return coef_.begin()->second;
}

void UniSeries::set_coeff(int exp, const Rat& c) {
    if (exp < 0) throw Error("negative exponent in series");
    if (exp > trunc_ || c == 0)
        coef_.erase(exp);
    else
        coef_[exp] = c;
}

UniSeries UniSeries::truncated(int new_trunc) const {
    UniSeries r(var_, std::min(trunc_, new_trunc));
    for (const auto& [e, c] : coef_)
        if (e <= r.trunc_) r.coef_.emplace(e, c);
    return r;
}

UniSeries operator+(const UniSeries& a, const UniSeries& b) {
    require_same_var(a, b, "add");
    UniSeries r(a.var(), std::min(a.trunc_, b.trunc_));
    r.coef_ = a.coef_;
    for (const auto& [e, c] : b.coef_) {
        auto [it, fresh] = r.coef_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) r.coef_.erase(it);
        }
    }
    std::erase_if(r.coef_, [&](const auto& kv) { return kv.first > r.trunc_; });
    return r;
}

UniSeries operator-(const UniSeries& a, const UniSeries& b) { return a + (-b); }

UniSeries UniSeries::operator-() const {
    UniSeries r(var_, trunc_);
    for (const auto& [e, c] : coef_) r.coef_.emplace(e, -c);
    return r;
}

UniSeries operator*(const UniSeries& a, const UniSeries& b) {
    require_same_var(a, b, "mul");
    int t = std::min(trunc_add(a.trunc_, order_floor(b)), trunc_add(b.trunc_, order_floor(a)));
    UniSeries r(a.var(), t);
    for (const auto& [ea, ca] : a.coef_) {
        if (ea > t) break;
        for (const auto& [eb, cb] : b.coef_) {
            int e = ea + eb;
            if (e > t) break;
            auto [it, fresh] = r.coef_.emplace(e, ca * cb);
            if (!fresh) it->second += ca * cb;
        }
    }
    std::erase_if(r.coef_, [](const auto& kv) { return kv.second == 0; });
    return r;
}

UniSeries scale(const UniSeries& s, const Rat& c) {
    if (c == 0) return UniSeries::zero(s.var());  // exactly zero
    UniSeries r(s.var(), s.trunc());
    for (const auto& [e, v] : s.terms()) r.set_coeff(e, c * v);
    return r;
}

void add_scaled(UniSeries& dst, const UniSeries& src, const Rat& c) {
    if (c == 0) return;
    if (dst.var() != src.var()) throw Error("add_scaled: variable tag mismatch");
    int t = std::min(dst.trunc(), src.trunc());
    if (t < dst.trunc()) dst = dst.truncated(t);
    for (const auto& [e, v] : src.terms()) {
        if (e > t) break;
        dst.set_coeff(e, dst.coeff(e) + c * v);
    }
}

UniSeries derive(const UniSeries& s) {
    UniSeries r(s.var(), s.is_exact() ? kExactTrunc : s.trunc() - 1);
    for (const auto& [e, c] : s.terms())
        if (e >= 1) r.set_coeff(e - 1, c * e);
    return r;
}

UniSeries power(const UniSeries& s, int n) {
    if (n < 0) throw Error("negative series power");
    UniSeries r = UniSeries::monomial(s.var(), Rat(1), 0);
    for (int i = 0; i < n; ++i) r = r * s;
    return r;
}

UniSeries retag(const UniSeries& s, Var v) {
    UniSeries r(v, s.trunc());
    for (const auto& [e, c] : s.terms()) r.set_coeff(e, c);
    return r;
}

UniSeries divide_monomial(const UniSeries& s, const Rat& c, int p) {
    if (c == 0) throw Error("division by zero monomial");
    auto o = s.order();
    if (o && *o < p) throw Error("divide_monomial: non-exact division");
    UniSeries r(s.var(), s.is_exact() ? kExactTrunc : s.trunc() - p);
    for (const auto& [e, v] : s.terms()) r.set_coeff(e - p, v / c);
    return r;
}

UniSeries reparametrize(const UniSeries& s, const UniSeries& rho) {
    require_same_var(s, rho, "reparametrize");
    auto o = rho.order();
    if (!o || *o != 1) throw Error("reparametrize: substitution must have order 1");
    if (s.is_zero()) return s;
    // Horner over descending exponents of s.
    std::vector<std::pair<int, Rat>> terms(s.terms().begin(), s.terms().end());
    UniSeries acc = UniSeries::monomial(s.var(), terms.back().second, 0);
    for (size_t i = terms.size() - 1; i-- > 0;) {
        int gap = terms[i + 1].first - terms[i].first;
        acc = acc * power(rho, gap);
        acc = acc + UniSeries::monomial(s.var(), terms[i].second, 0);
    }
    acc = acc * power(rho, terms[0].first);
    // Unknown terms of s above its truncation pull back at orders > trunc(s).
    return acc.truncated(std::min(acc.trunc(), s.trunc()));
}

namespace {

int finite_depth(int trunc, const char* who) {
    if (trunc >= kExactTrunc)
        throw Error(std::string(who) + ": input must carry a finite truncation");
    return trunc;
}

}  // namespace

UniSeries compositional_inverse(const UniSeries& rho) {
    auto o = rho.order();
    if (!o || *o != 1 || rho.coeff(1) == 0)
        throw Error("compositional_inverse: series must have order 1 with nonzero linear coefficient");
    int top = finite_depth(rho.trunc(), "compositional_inverse");
    Rat lc = rho.coeff(1);
    UniSeries t_var = UniSeries::variable(rho.var(), top);
    UniSeries sigma = UniSeries::monomial(rho.var(), 1 / lc, 1, top);
    UniSeries drho = derive(rho);
    // Newton steps double the number of correct orders.
    for (int iter = 0; iter < 40; ++iter) {
        UniSeries err = reparametrize(rho, sigma).truncated(top) - t_var;
        if (err.is_zero()) return sigma;
        UniSeries denom = reparametrize(drho, sigma).truncated(top);
        sigma = (sigma - err * unit_inverse(denom)).truncated(top);
    }
    throw Error("compositional_inverse: no convergence (truncation bug)");
}

UniSeries unit_inverse(const UniSeries& u) {
    Rat u0 = u.coeff(0);
    if (u0 == 0) throw Error("unit_inverse: not a unit");
    int t = finite_depth(u.trunc(), "unit_inverse");
    UniSeries v = UniSeries::monomial(u.var(), 1 / u0, 0, t);
    for (int n = 1; n <= t; ++n) {
        Rat err = (u * v).coeff(n);
        if (err == 0) continue;
        v.set_coeff(n, -err / u0);
    }
    return v;
}

UniSeries unit_nth_root(const UniSeries& u, int n) {
    if (n <= 0) throw Error("unit_nth_root: n must be positive");
    if (u.coeff(0) != 1) throw Error("unit_nth_root: unit must have constant term 1");
    int t = finite_depth(u.trunc(), "unit_nth_root");
    UniSeries r = UniSeries::monomial(u.var(), Rat(1), 0, t);
    for (int k = 1; k <= t; ++k) {
        Rat err = power(r, n).coeff(k) - u.coeff(k);
        if (err == 0) continue;
        r.set_coeff(k, -err / n);
    }
    return r;
}

UniSeries flow_reparametrization(const UniSeries& eps) {
    auto o = eps.order();
    if (o && *o < 2) throw Error("flow_reparametrization: field must vanish to order 2");
    if (!o) return UniSeries::variable(eps.var(), eps.trunc());
    int t = finite_depth(eps.trunc(), "flow_reparametrization");
    UniSeries result = UniSeries::variable(eps.var(), t);
    UniSeries iterate = UniSeries::variable(eps.var(), t);
    Rat factorial(1);
    for (int n = 1; n <= t + 2; ++n) {
        iterate = (eps * derive(iterate)).truncated(t);
        if (iterate.is_zero()) return result;
        factorial *= n;
        result = result + scale(iterate, 1 / factorial);
    }
    throw Error("flow_reparametrization: flow did not terminate (order < 2 term?)");
}

std::string UniSeries::to_string() const {
    if (coef_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : coef_) {
        Rat a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        if (e == 0) {
            os << rat_to_string(a);
        } else {
            if (a != 1) os << rat_to_string(a) << "*";
            os << "t";
            if (e != 1) os << "^" << e;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// BiPoly

BiPoly BiPoly::monomial(const Rat& c, int a, int b, int deg_bound) {
    BiPoly p(deg_bound);
    p.set_coeff(a, b, c);
    return p;
}

std::optional<int> BiPoly::min_degree() const {
    std::optional<int> best;
    for (const auto& [k, c] : coef_) {
        int d = k.first + k.second;
        if (!best || d < *best) best = d;
    }
    return best;
}

int BiPoly::max_degree() const {
    int best = 0;
    for (const auto& [k, c] : coef_) best = std::max(best, k.first + k.second);
    return best;
}

Rat BiPoly::coeff(int a, int b) const {
    auto it = coef_.find({a, b});
    return it == coef_.end() ? Rat(0) : it->second;
}

void BiPoly::set_coeff(int a, int b, const Rat& c) {
    if (a < 0 || b < 0) throw Error("negative exponent in polynomial");
    if (a + b > deg_bound_ || c == 0)
        coef_.erase({a, b});
    else
        coef_[{a, b}] = c;
}

BiPoly BiPoly::truncated(int new_bound) const {
    BiPoly r(std::min(deg_bound_, new_bound));
    for (const auto& [k, c] : coef_)
        if (k.first + k.second <= r.deg_bound_) r.coef_.emplace(k, c);
    return r;
}

BiPoly operator+(const BiPoly& a, const BiPoly& b) {
    BiPoly r(std::min(a.deg_bound_, b.deg_bound_));
    r.coef_ = a.coef_;
    for (const auto& [k, c] : b.coef_) {
        auto [it, fresh] = r.coef_.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) r.coef_.erase(it);
        }
    }
    std::erase_if(r.coef_, [&](const auto& kv) { return kv.first.first + kv.first.second > r.deg_bound_; });
    return r;
}

BiPoly operator-(const BiPoly& a, const BiPoly& b) { return a + (-b); }

BiPoly BiPoly::operator-() const {
    BiPoly r(deg_bound_);
    for (const auto& [k, c] : coef_) r.coef_.emplace(k, -c);
    return r;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    int bound = std::min(trunc_add(a.deg_bound_, min_degree_floor(b)), trunc_add(b.deg_bound_, min_degree_floor(a)));
    BiPoly r(bound);
    for (const auto& [ka, ca] : a.coef_) {
        for (const auto& [kb, cb] : b.coef_) {
            int da = ka.first + kb.first, db = ka.second + kb.second;
            if (da + db > bound) continue;
            auto [it, fresh] = r.coef_.emplace(BiPoly::Key{da, db}, ca * cb);
            if (!fresh) it->second += ca * cb;
        }
    }
    std::erase_if(r.coef_, [](const auto& kv) { return kv.second == 0; });
    return r;
}

BiPoly scale(const BiPoly& p, const Rat& c) {
    if (c == 0) return BiPoly();
    BiPoly r(p.deg_bound());
    for (const auto& [k, v] : p.terms()) r.set_coeff(k.first, k.second, c * v);
    return r;
}

BiPoly d_dx(const BiPoly& p) {
    BiPoly r(p.is_exact() ? kExactTrunc : p.deg_bound() - 1);
    for (const auto& [k, c] : p.terms())
        if (k.first >= 1) r.set_coeff(k.first - 1, k.second, c * k.first);
    return r;
}

BiPoly d_dy(const BiPoly& p) {
    BiPoly r(p.is_exact() ? kExactTrunc : p.deg_bound() - 1);
    for (const auto& [k, c] : p.terms())
        if (k.second >= 1) r.set_coeff(k.first, k.second - 1, c * k.second);
    return r;
}

UniSeries compose_bipoly(const BiPoly& p, const UniSeries& x, const UniSeries& y) {
    require_same_var(x, y, "compose_bipoly");
    auto ox = x.order(), oy = y.order();
    if ((ox && *ox < 1) || (oy && *oy < 1))
        throw Error("compose_bipoly: series components must vanish at the origin");
    int trunc_cap = std::min(x.trunc(), y.trunc());
    if (!p.is_exact()) {
        // Unknown monomials of total degree deg_bound+1 pull back at order
        // >= (deg_bound+1) * min component order.
        int minord = std::min(ox ? *ox : kExactTrunc, oy ? *oy : kExactTrunc);
        if (minord < kExactTrunc) {
            long cap = static_cast<long>(trunc_add(p.deg_bound(), 1)) * std::max(minord, 1) - 1;
            if (cap < trunc_cap) trunc_cap = static_cast<int>(std::max(cap, 0L));
        }
    }
    UniSeries result = UniSeries::zero(x.var(), trunc_cap);
    // Cached power ladders keep this the workhorse cheap.
    std::vector<UniSeries> xp{UniSeries::monomial(x.var(), Rat(1), 0, trunc_cap)};
    std::vector<UniSeries> yp{UniSeries::monomial(y.var(), Rat(1), 0, trunc_cap)};
    auto pow_of = [&](std::vector<UniSeries>& cache, const UniSeries& base, int n) -> const UniSeries& {
        while (static_cast<int>(cache.size()) <= n) cache.push_back(cache.back() * base);
        return cache[n];
    };
    for (const auto& [k, c] : p.terms()) {
        UniSeries term = scale(pow_of(xp, x, k.first) * pow_of(yp, y, k.second), c);
        result = result + term.truncated(trunc_cap);
    }
    return result.truncated(trunc_cap);
}

BiPoly compose_bipoly_pair(const BiPoly& p, const BiPoly& u, const BiPoly& v) {
    if ((u.min_degree() && *u.min_degree() < 1) || (v.min_degree() && *v.min_degree() < 1))
        throw Error("compose_bipoly_pair: substitutions must vanish at the origin");
    int bound = std::min(u.deg_bound(), v.deg_bound());
    if (!p.is_exact()) {
        int mindeg = std::min(min_degree_floor(u), min_degree_floor(v));
        long cap = static_cast<long>(trunc_add(p.deg_bound(), 1)) * std::max(std::min(mindeg, kExactTrunc), 1) - 1;
        if (cap < bound) bound = static_cast<int>(std::max(cap, 0L));
    }
    BiPoly result(bound);
    std::vector<BiPoly> up{BiPoly::monomial(Rat(1), 0, 0, bound)};
    std::vector<BiPoly> vp{BiPoly::monomial(Rat(1), 0, 0, bound)};
    auto pow_of = [&](std::vector<BiPoly>& cache, const BiPoly& base, int n) -> const BiPoly& {
        while (static_cast<int>(cache.size()) <= n) cache.push_back(cache.back() * base);
        return cache[n];
    };
    for (const auto& [k, c] : p.terms())
        result = result + scale(pow_of(up, u, k.first) * pow_of(vp, v, k.second), c).truncated(bound);
    return result.truncated(bound);
}

std::pair<BiPoly, BiPoly> plane_inverse(const BiPoly& sx, const BiPoly& sy, int deg_bound) {
    Rat a = sx.coeff(1, 0), b = sx.coeff(0, 1);
    Rat c = sy.coeff(1, 0), d = sy.coeff(0, 1);
    Rat det = a * d - b * c;
    if (det == 0) throw Error("plane_inverse: linear part is singular");
    if (sx.coeff(0, 0) != 0 || sy.coeff(0, 0) != 0) throw Error("plane_inverse: map must fix the origin");
    auto lin_solve = [&](const BiPoly& px, const BiPoly& py) {
        // (x, y) -> Lin^{-1} (px, py)
        return std::pair<BiPoly, BiPoly>{scale(px, d / det) + scale(py, -b / det),
                                         scale(px, -c / det) + scale(py, a / det)};
    };
    auto [tx, ty] = lin_solve(BiPoly::monomial(Rat(1), 1, 0, deg_bound), BiPoly::monomial(Rat(1), 0, 1, deg_bound));
    BiPoly id_x = BiPoly::monomial(Rat(1), 1, 0, deg_bound), id_y = BiPoly::monomial(Rat(1), 0, 1, deg_bound);
    for (int pass = 0; pass <= deg_bound + 2; ++pass) {
        BiPoly ex = compose_bipoly_pair(sx, tx, ty).truncated(deg_bound) - id_x;
        BiPoly ey = compose_bipoly_pair(sy, tx, ty).truncated(deg_bound) - id_y;
        if (ex.is_zero() && ey.is_zero()) return {tx, ty};
        auto [cx, cy] = lin_solve(ex, ey);
        tx = tx - cx;
        ty = ty - cy;
    }
    throw Error("plane_inverse: no convergence (degree bound bug)");
}

std::pair<BiPoly, BiPoly> flow_plane_automorphism(const BiPoly& eta1, const BiPoly& eta2, int deg_bound) {
    for (const auto& [k, c] : eta1.terms()) {
        int d = k.first + k.second;
        if (d < 1 || (d == 1 && k.first == 1))
            throw Error("flow_plane_automorphism: eta1 linear part may only contain y");
    }
    if (auto d = eta2.min_degree(); d && *d < 2)
        throw Error("flow_plane_automorphism: eta2 must lie in the square of the maximal ideal");
    BiPoly e1 = eta1.truncated(deg_bound), e2 = eta2.truncated(deg_bound);
    auto apply_field = [&](const BiPoly& f) { return (e1 * d_dx(f) + e2 * d_dy(f)).truncated(deg_bound); };
    auto exp_on = [&](BiPoly start) {
        BiPoly sum = start;
        BiPoly iterate = std::move(start);
        Rat factorial(1);
        // Each application raises total degree or lowers x-degree at fixed
        // degree (the y d/dx part), so the iterates die below the bound.
        long cap = static_cast<long>(deg_bound + 2) * (deg_bound + 2);
        for (long n = 1; n <= cap; ++n) {
            iterate = apply_field(iterate);
            if (iterate.is_zero()) return sum;
            factorial *= n;
            sum = sum + scale(iterate, 1 / factorial);
        }
        throw Error("flow_plane_automorphism: flow did not terminate (bad field)");
    };
    return {exp_on(BiPoly::monomial(Rat(1), 1, 0, deg_bound)), exp_on(BiPoly::monomial(Rat(1), 0, 1, deg_bound))};
}

std::string BiPoly::to_string() const {
    if (coef_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : coef_) {
        Rat a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        auto [ex, ey] = k;
        if (ex == 0 && ey == 0) {
            os << rat_to_string(a);
            continue;
        }
        bool coeff_shown = false;
        if (a != 1) {
            os << rat_to_string(a);
            coeff_shown = true;
        }
        if (ex > 0) {
            if (coeff_shown) os << "*";
            os << "x";
            if (ex > 1) os << "^" << ex;
            coeff_shown = true;
        }
        if (ey > 0) {
            if (coeff_shown) os << "*";
            os << "y";
            if (ey > 1) os << "^" << ey;
        }
    }
    return os.str();
}

}  // namespace bigerm
