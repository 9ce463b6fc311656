#include "bigerm/table.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "bigerm/io.hpp"

namespace bigerm {

namespace {

struct BranchFam {
    int m;
    int jstar;         // dictated lowest free exponent; 0 when smooth
    int sg_conductor;  // conductor of the branch semigroup
    std::string sym;   // display symbol for jstar ("j", "3+alpha", ...)
    std::string ann;   // row annotation ("j = 1 mod 2", "alpha = 1,2")
};

std::vector<BranchFam> families_for(int m, int max_odd, const std::string& suffix) {
    std::vector<BranchFam> out;
    if (m == 1) {
        out.push_back({1, 0, 0, "", ""});
    } else if (m == 2) {
        std::string sym = "j" + suffix;
        for (int j = 3; j <= max_odd; j += 2) out.push_back({2, j, j - 1, sym, sym + " = 1 mod 2"});
    } else if (m == 3) {
        std::string sym = "3+alpha" + suffix;
        for (int al = 1; al <= 2; ++al) out.push_back({3, 3 + al, 2 * (2 + al), sym, "alpha" + suffix + " = 1,2"});
    } else {
        throw Error("table: multiplicities above 3 are not in the default ranges");
    }
    return out;
}

const std::vector<Rat>& coeff_pool() {
    static const std::vector<Rat> pool = {rat(1),     rat(-1),    rat(2),    rat(-2),   rat(1, 2),
                                          rat(-1, 2), rat(3),     rat(1, 3), rat(3, 2), rat(-3)};
    return pool;
}

UniSeries sample_free_comp(Rng& rng, Var v, const BranchFam& f, int cap, int style) {
    // style: 0 = dictated support only, 1 = full support, else random subset
    UniSeries s = UniSeries::zero(v);
    int lo = f.jstar > 0 ? f.jstar : f.m + 1;
    if (f.jstar > 0) s.set_coeff(f.jstar, rng.pick(coeff_pool()));
    if (style == 0) return s;
    for (int e = (f.jstar > 0 ? f.jstar + 1 : lo); e <= cap; ++e)
        if (style == 1 || rng.chance(1, 2)) s.set_coeff(e, rng.pick(coeff_pool()));
    return s;
}

struct Sig {
    std::string case_label;
    bool mirrored = false;
    // per display branch: sorted (q, pivot) with q the offset count in
    // exp = jstar + q (jstar - m); raw exponents are coded as 1000 + exp
    std::vector<std::pair<int, bool>> b1, b2;
    auto operator<=>(const Sig&) const = default;
};

int offset_code(int exp, const BranchFam& f) {
    if (f.jstar == 0) return 1000 + exp;
    int step = f.jstar - f.m;
    if (step > 0 && (exp - f.jstar) % step == 0 && exp >= f.jstar) return (exp - f.jstar) / step;
    return 1000 + exp;
}

Sig signature_of(const NormalForm& nf, const BranchFam& f1, const BranchFam& f2) {
    Sig s;
    s.case_label = nf.case_label;
    s.mirrored = nf.mirrored;
    for (const auto& tm : nf.terms) {
        bool piv = tm.flag != TermFlag::Kept;
        if (tm.branch == 1)
            s.b1.push_back({offset_code(tm.exp, f1), piv});
        else
            s.b2.push_back({offset_code(tm.exp, f2), piv});
    }
    std::sort(s.b1.begin(), s.b1.end());
    std::sort(s.b2.begin(), s.b2.end());
    return s;
}

std::string exp_string(int code, const BranchFam& f) {
    if (code >= 1000) return std::to_string(code - 1000);
    if (code == 0) return f.sym;
    if (f.m == 3) {
        std::string base = f.sym.substr(2);  // "alpha..."
        return "3+" + std::to_string(code + 1) + base;
    }
    if (code == 1) return "2*" + f.sym + "-" + std::to_string(f.m);
    return f.sym + "+" + std::to_string(code) + "*(" + f.sym + "-" + std::to_string(f.m) + ")";
}

std::string render_family(const Sig& sig, const BranchFam& f1, const BranchFam& f2) {
    char next_param = 'a';
    std::vector<char> params;
    auto sum_string = [&](const std::vector<std::pair<int, bool>>& terms, const BranchFam& f, const std::string& var) {
        if (terms.empty()) return std::string("0");
        std::string out;
        for (const auto& [code, piv] : terms) {
            if (!out.empty()) out += "+";
            if (!piv) {
                out += std::string(1, next_param) + "*";
                params.push_back(next_param++);
            }
            std::string e = exp_string(code, f);
            out += var + (e == "1" ? "" : "^" + (e.find_first_not_of("0123456789") == std::string::npos
                                                     ? e
                                                     : "(" + e + ")"));
        }
        return out;
    };
    auto power = [&](const std::string& var, int m) { return m == 1 ? var : var + "^" + std::to_string(m); };
    std::string s1 = "(" + power("t1", f1.m) + "," + sum_string(sig.b1, f1, "t1") + ")";
    std::string s2 = "(" + sum_string(sig.b2, f2, "t2") + "," + power("t2", f2.m) + ")";
    std::string out = s1 + " " + s2;
    std::string ann;
    auto add_ann = [&](const std::string& a) {
        if (a.empty()) return;
        if (ann.find(a) != std::string::npos) return;
        ann += (ann.empty() ? "" : ", ") + a;
    };
    if (!sig.b1.empty()) add_ann(f1.ann);
    if (!sig.b2.empty()) add_ann(f2.ann);
    if (!params.empty()) {
        std::string ps;
        for (char p : params) ps += std::string(ps.empty() ? "" : ",") + p;
        add_ann(ps + " != 0");
    }
    if (!ann.empty()) out += ";  " + ann;
    return out;
}

}  // namespace

std::vector<TableRow> generate_table(const TableOptions& opts) {
    std::vector<TableRow> rows;
    for (auto [pa, pb] : opts.pairs) {
        int mbig = std::max(pa, pb), msmall = std::min(pa, pb);
        bool symmetric = mbig == msmall;
        auto fams1 = families_for(mbig, opts.max_odd_exp, symmetric && mbig > 1 ? "1" : "");
        auto fams2 = families_for(msmall, opts.max_odd_exp, symmetric && mbig > 1 ? "2" : "");
        struct FamilyData {
            std::set<std::size_t> combos;
            std::string fallback;
        };
        std::map<Sig, FamilyData> observed;
        std::size_t ncombos = fams1.size() * fams2.size();
        int per_combo = std::max<int>(5, opts.samples / static_cast<int>(ncombos));
        Rng rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(mbig * 16 + msmall));
        std::size_t combo_id = 0;
        for (const auto& f1 : fams1)
            for (const auto& f2 : fams2) {
                int c = std::max(f1.sg_conductor, f2.sg_conductor) + mbig * msmall;
                int cap = c - 1;
                for (int s = 0; s < per_combo; ++s) {
                    int style1 = s == 0 || s == 3 ? 0 : (s == 1 || s == 2 ? 1 : 2);
                    int style2 = s == 0 || s == 2 ? 0 : (s == 1 || s == 3 ? 1 : 2);
                    Bigerm phi;
                    phi.delta = 1;
                    phi.b1 = Branch(UniSeries::monomial(Var::t1, Rat(1), f1.m),
                                    sample_free_comp(rng, Var::t1, f1, cap, style1));
                    phi.b2 = Branch(sample_free_comp(rng, Var::t2, f2, cap, style2),
                                    UniSeries::monomial(Var::t2, Rat(1), f2.m));
                    try {
                        validate(phi);
                    } catch (const Error&) {
                        continue;  // e.g. an imprimitive random subset
                    }
                    NormalForm nf = normal_form(phi);
                    Sig sig = signature_of(nf, f1, f2);
                    auto& fd = observed[sig];
                    fd.combos.insert(combo_id);
                    if (fd.fallback.empty()) fd.fallback = render_normal_form(nf);
                }
                ++combo_id;
            }
        TableRow row;
        row.pair = {pa, pb};
        std::vector<std::pair<Sig, FamilyData>> ordered(observed.begin(), observed.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
            std::size_t nx = x.first.b1.size() + x.first.b2.size();
            std::size_t ny = y.first.b1.size() + y.first.b2.size();
            if (nx != ny) return nx < ny;
            return x.first < y.first;
        });
        for (const auto& [sig, fd] : ordered) {
            std::string text = render_family(sig, fams1.front(), fams2.front());
            if (fd.combos.size() != ncombos)
                text += "  [seen in " + std::to_string(fd.combos.size()) + "/" + std::to_string(ncombos) +
                        " parameter choices, e.g. " + fd.fallback + "]";
            row.families.push_back(text);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string table_markdown(const std::vector<TableRow>& rows) {
    std::ostringstream os;
    os << "| (m1,m2) | Normal Form |\n";
    os << "|---------|-------------|\n";
    for (const auto& row : rows) {
        bool first = true;
        for (const auto& fam : row.families) {
            os << "| " << (first ? "(" + std::to_string(row.pair.first) + "," + std::to_string(row.pair.second) + ")"
                                 : std::string())
               << " | " << fam << " |\n";
            first = false;
        }
        if (row.families.empty())
            os << "| (" << row.pair.first << "," << row.pair.second << ") | (no families sampled) |\n";
    }
    return os.str();
}

}  // namespace bigerm
