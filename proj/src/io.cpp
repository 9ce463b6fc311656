#include "bigerm/io.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

namespace bigerm {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw Error("parse error at position " + std::to_string(i) + " in \"" + s + "\": " + what);
    }
};

Int parse_integer(Cursor& c) {
    c.skip_ws();
    std::size_t start = c.i;
    while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
    if (c.i == start) c.fail("expected a number");
    return Int(c.s.substr(start, c.i - start));
}

Rat parse_rat_token(Cursor& c) {
    Int num = parse_integer(c);
    if (c.eat('/')) {
        Int den = parse_integer(c);
        return rat(num, den);
    }
    return Rat(num);
}

int parse_exponent(Cursor& c) {
    if (!c.eat('^')) return 1;
    Int e = parse_integer(c);
    if (!e.fits_sint_p()) c.fail("exponent too large");
    return static_cast<int>(e.get_si());
}

// term := [rational] { '*' factor } | factor { '*' factor }
// factor := var ['^' int]
template <typename EmitMono>
void parse_sum(const std::string& text, const std::string& vars, EmitMono emit) {
    Cursor c{text};
    if (c.done()) throw Error("empty expression");
    bool first = true;
    while (!c.done()) {
        Rat sign(1);
        if (c.eat('+')) {
        } else if (c.eat('-')) {
            sign = -1;
        } else if (!first) {
            c.fail("expected '+' or '-'");
        }
        first = false;
        Rat coeff = sign;
        std::map<char, int> exps;
        bool saw_factor = false;
        for (;;) {
            char p = c.peek();
            if (std::isdigit(static_cast<unsigned char>(p))) {
                coeff *= parse_rat_token(c);
                saw_factor = true;
            } else if (vars.find(p) != std::string::npos) {
                ++c.i;
                exps[p] += parse_exponent(c);
                saw_factor = true;
            } else {
                c.fail("expected a coefficient or a variable");
            }
            if (!c.eat('*')) break;
        }
        if (!saw_factor) c.fail("empty term");
        emit(coeff, exps);
    }
}

}  // namespace

Rat parse_rational(const std::string& text) {
    Cursor c{text};
    Rat sign(1);
    if (c.eat('-')) sign = -1;
    Rat v = sign * parse_rat_token(c);
    if (!c.done()) c.fail("trailing characters after rational");
    return v;
}

UniSeries parse_uniseries(const std::string& text, Var v) {
    UniSeries s = UniSeries::zero(v);
    parse_sum(text, "t", [&](const Rat& coeff, const std::map<char, int>& exps) {
        int e = 0;
        if (auto it = exps.find('t'); it != exps.end()) e = it->second;
        s.set_coeff(e, s.coeff(e) + coeff);
    });
    return s;
}

BiPoly parse_bipoly(const std::string& text) {
    BiPoly p;
    parse_sum(text, "xy", [&](const Rat& coeff, const std::map<char, int>& exps) {
        int a = 0, b = 0;
        if (auto it = exps.find('x'); it != exps.end()) a = it->second;
        if (auto it = exps.find('y'); it != exps.end()) b = it->second;
        p.set_coeff(a, b, p.coeff(a, b) + coeff);
    });
    return p;
}

namespace {

Branch parse_branch_line(const std::string& rest, Var v, int line_no) {
    // "x = <series>, y = <series>"
    auto comma = rest.find(',');
    if (comma == std::string::npos)
        throw Error("line " + std::to_string(line_no) + ": expected \"x = ..., y = ...\"");
    auto parse_side = [&](std::string part, char want) {
        auto eq = part.find('=');
        if (eq == std::string::npos)
            throw Error("line " + std::to_string(line_no) + ": missing '=' in component");
        std::string lhs = part.substr(0, eq);
        std::string rhs = part.substr(eq + 1);
        lhs.erase(remove_if(lhs.begin(), lhs.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }),
                  lhs.end());
        if (lhs.size() != 1 || lhs[0] != want)
            throw Error("line " + std::to_string(line_no) + ": expected component '" + want + "'");
        return rhs;
    };
    UniSeries x = parse_uniseries(parse_side(rest.substr(0, comma), 'x'), v);
    UniSeries y = parse_uniseries(parse_side(rest.substr(comma + 1), 'y'), v);
    return Branch(x, y);
}

Bigerm parse_bigerm_json(const std::string& text) {
    Json j = Json::parse(text);
    Bigerm phi;
    phi.delta = j.at("delta").get<int>();
    auto read_branch = [&](const Json& b, Var v) {
        return Branch(parse_uniseries(b.at("x").get<std::string>(), v), parse_uniseries(b.at("y").get<std::string>(), v));
    };
    phi.b1 = read_branch(j.at("branch1"), Var::t1);
    phi.b2 = read_branch(j.at("branch2"), Var::t2);
    validate(phi);
    return phi;
}

}  // namespace

Bigerm parse_bigerm(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (ch == '{') return parse_bigerm_json(text);
        break;
    }
    Bigerm phi;
    bool saw_delta = false, saw_b1 = false, saw_b2 = false;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        if (auto h = trimmed.find('#'); h != std::string::npos) trimmed.erase(h);
        if (trimmed.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto colon = trimmed.find(':');
        if (colon == std::string::npos) throw Error("line " + std::to_string(line_no) + ": expected \"key: value\"");
        std::string key = trimmed.substr(0, colon);
        key.erase(remove_if(key.begin(), key.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }),
                  key.end());
        std::string rest = trimmed.substr(colon + 1);
        if (key == "delta") {
            phi.delta = static_cast<int>(parse_rational(rest).get_num().get_si());
            saw_delta = true;
        } else if (key == "branch1") {
            phi.b1 = parse_branch_line(rest, Var::t1, line_no);
            saw_b1 = true;
        } else if (key == "branch2") {
            phi.b2 = parse_branch_line(rest, Var::t2, line_no);
            saw_b2 = true;
        } else {
            throw Error("line " + std::to_string(line_no) + ": unknown key \"" + key + "\"");
        }
    }
    if (!saw_b1 || !saw_b2) throw Error("bigerm needs branch1 and branch2 lines");
    if (!saw_delta) phi.delta = detect_case(phi.b1, phi.b2);
    validate(phi);
    return phi;
}

Bigerm load_bigerm(const std::string& path_or_dash) {
    std::string text;
    if (path_or_dash == "-") {
        std::ostringstream all;
        all << std::cin.rdbuf();
        text = all.str();
    } else {
        std::ifstream f(path_or_dash);
        if (!f) throw Error("cannot open " + path_or_dash);
        std::ostringstream all;
        all << f.rdbuf();
        text = all.str();
    }
    return parse_bigerm(text);
}

std::string format_series(const UniSeries& s, const std::string& var) {
    std::string out = s.to_string();
    if (var == "t") return out;
    std::string res;
    for (char ch : out) {
        if (ch == 't')
            res += var;
        else
            res += ch;
    }
    return res;
}

std::string format_bipoly(const BiPoly& p) { return p.to_string(); }

std::string format_witness(const Witness& w) {
    if (w.kind == WitnessKind::Function) return format_bipoly(w.form.eta1);
    std::string dy_part;
    BiPoly dy_poly = w.form.eta2;
    std::string beta;
    if (w.form.beta != 0) beta = rat_to_string(w.form.beta) + "*y + ";
    if (w.form.eta1.is_zero()) return beta.empty() ? "(" + format_bipoly(dy_poly) + ") dy"
                                                   : "(" + beta + format_bipoly(dy_poly) + ") dy";
    std::string out = "(" + format_bipoly(w.form.eta1) + ") dx";
    if (!dy_poly.is_zero() || w.form.beta != 0) out += " + (" + beta + format_bipoly(dy_poly) + ") dy";
    return out;
}

namespace {

Json point_json(const ValuePoint& p) { return Json::array({p.v1, p.v2}); }

}  // namespace

Json value_set_json(const ValueSet& v) {
    Json j;
    j["window"] = point_json(v.window);
    Json pts = Json::array();
    for (const auto& p : v.points) pts.push_back(point_json(p));
    j["points"] = pts;
    j["conductor"] = v.conductor ? point_json(*v.conductor) : Json();
    Json maxpts = Json::array();
    if (v.conductor)
        for (const auto& p : maximal_points(v)) maxpts.push_back(point_json(p));
    j["maximal"] = maxpts;
    j["quadrant_verified"] = v.quadrant_verified;
    return j;
}

Json invariants_json(const BigermInvariants& inv, bool include_witnesses) {
    Json j;
    j["delta"] = inv.normalized.delta;
    j["multiplicity"] = Json::array({inv.normalized.m1(), inv.normalized.m2()});
    j["gamma"] = value_set_json(inv.gamma);
    j["lambda"] = value_set_json(inv.lambda);
    j["lambda_delta"] = value_set_json(inv.lambda_delta);
    j["conductor_max"] = inv.conductor_max;
    j["working_truncation"] = inv.spec_trunc;
    j["intersection_multiplicity"] = intersection_multiplicity(inv.normalized);
    if (include_witnesses) {
        auto dump_table = [](const WitnessTable& t) {
            Json w;
            for (const auto& [p, wit] : t)
                w[std::to_string(p.v1) + "," + std::to_string(p.v2)] = format_witness(wit);
            return w;
        };
        j["witnesses"] = Json{{"gamma", dump_table(inv.gamma_w)},
                              {"lambda", dump_table(inv.lambda_w)},
                              {"lambda_delta", dump_table(inv.lambda_delta_w)}};
    }
    return j;
}

namespace {

const char* flag_name(TermFlag f) {
    switch (f) {
        case TermFlag::Kept: return "kept";
        case TermFlag::Pivot: return "pivot";
        case TermFlag::PendingScale: return "pending-scale";
    }
    return "?";
}

}  // namespace

Json normal_form_json(const NormalForm& nf) {
    Json j;
    j["case"] = nf.case_label;
    j["delta"] = nf.reduced.delta;
    j["m"] = Json::array({nf.reduced.m1(), nf.reduced.m2()});
    j["j1"] = nf.j1 ? Json(*nf.j1) : Json();
    j["j2"] = nf.j2 ? Json(*nf.j2) : Json();
    j["k"] = nf.k ? Json(*nf.k) : Json();
    j["mirrored"] = nf.mirrored;
    Json terms = Json::array();
    for (const auto& tm : nf.terms)
        terms.push_back(Json{{"branch", tm.branch}, {"exp", tm.exp}, {"coeff", rat_to_string(tm.coeff)},
                             {"flag", flag_name(tm.flag)}});
    j["terms"] = terms;
    j["rendered"] = render_normal_form(nf);
    j["gamma"] = value_set_json(nf.gamma);
    j["lambda_delta"] = value_set_json(nf.lambda_delta);
    j["conductor_max"] = nf.conductor_max;
    return j;
}

std::string render_normal_form(const NormalForm& nf) {
    auto comp = [&](const UniSeries& s, int branch, const std::string& var) {
        // pending-scale pivots display as 1 with the footnote below
        UniSeries display = s;
        for (const auto& tm : nf.terms)
            if (tm.branch == branch && tm.flag == TermFlag::PendingScale) display.set_coeff(tm.exp, Rat(1));
        return format_series(display, var);
    };
    const Bigerm& r = nf.reduced;
    std::string out = "(" + comp(r.b1.x, 1, "t1") + ", " + comp(r.b1.y, 1, "t1") + ") (" + comp(r.b2.x, 2, "t2") + ", " +
                      comp(r.b2.y, 2, "t2") + ")";
    std::string notes;
    for (const auto& tm : nf.terms)
        if (tm.flag == TermFlag::PendingScale)
            notes += std::string(notes.empty() ? "" : "; ") + "branch " + std::to_string(tm.branch) + " t^" +
                     std::to_string(tm.exp) + " pivot shown as 1, stored coefficient " + rat_to_string(tm.coeff);
    if (!notes.empty()) out += "  [" + notes + " — scaling exists over C but not over Q]";
    return out;
}

Json verdict_json(const Verdict& v) {
    Json j;
    j["equivalent"] = v.equivalent;
    j["branch_order"] = v.branch_order.empty() ? Json() : Json(v.branch_order);
    j["case"] = v.case_label.empty() ? Json() : Json(v.case_label);
    Json cs = Json::array();
    for (const auto& c : v.constraints) {
        Json e = Json::array();
        for (const auto& x : c.exponents) e.push_back(x.get_str());
        cs.push_back(Json{{"exponents", e}, {"ratio", rat_to_string(c.ratio)}});
    }
    j["constraints"] = cs;
    j["detail"] = v.detail;
    return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bigerm
