#include <iostream>

#include "CLI11.hpp"

#include "bigerm/io.hpp"
#include "bigerm/selftest.hpp"
#include "bigerm/table.hpp"

using namespace bigerm;

namespace {

int cmd_invariants(const std::string& input, bool json, bool witnesses) {
    Bigerm phi = load_bigerm(input);
    BigermInvariants inv = compute_invariants(phi);
    if (json) {
        std::cout << dump_json(invariants_json(inv, witnesses));
        return 0;
    }
    auto show = [&](const char* name, const ValueSet& v) {
        std::cout << name << ": " << v.points.size() << " points in window (" << v.window.v1 << "," << v.window.v2
                  << ")";
        if (v.conductor) std::cout << ", conductor (" << v.conductor->v1 << "," << v.conductor->v2 << ")";
        std::cout << "\n  points:";
        for (const auto& p : v.points) std::cout << " (" << p.v1 << "," << p.v2 << ")";
        std::cout << "\n  maximal:";
        if (v.conductor)
            for (const auto& p : maximal_points(v)) std::cout << " (" << p.v1 << "," << p.v2 << ")";
        std::cout << "\n";
    };
    std::cout << "multiplicity (" << inv.normalized.m1() << "," << inv.normalized.m2() << "), tangency case "
              << inv.normalized.delta << ", intersection multiplicity " << intersection_multiplicity(inv.normalized)
              << ", working truncation " << inv.spec_trunc << "\n";
    show("gamma", inv.gamma);
    show("lambda", inv.lambda);
    show("lambda[delta]", inv.lambda_delta);
    if (witnesses) {
        std::cout << "witnesses (lambda[delta]):\n";
        for (const auto& [p, w] : inv.lambda_delta_w)
            std::cout << "  (" << p.v1 << "," << p.v2 << ") <- " << format_witness(w) << "\n";
    }
    return 0;
}

int cmd_normal_form(const std::string& input, bool json) {
    Bigerm phi = load_bigerm(input);
    NormalForm nf = normal_form(phi);
    if (json) {
        std::cout << dump_json(normal_form_json(nf));
    } else {
        std::cout << "case " << nf.case_label << (nf.mirrored ? " (branch roles reversed)" : "") << "\n"
                  << render_normal_form(nf) << "\n";
    }
    return 0;
}

int cmd_equiv(const std::string& a, const std::string& b, bool json) {
    Bigerm phi = load_bigerm(a);
    Bigerm psi = load_bigerm(b);
    Verdict v = decide_equivalence(phi, psi);
    if (json)
        std::cout << dump_json(verdict_json(v));
    else
        std::cout << (v.equivalent ? "equivalent (" + v.branch_order + ", case " + v.case_label + ")"
                                   : "not equivalent: " + v.detail)
                  << "\n";
    return v.equivalent ? 0 : 1;
}

int cmd_table(const TableOptions& opts, bool json) {
    auto rows = generate_table(opts);
    if (json) {
        Json j = Json::array();
        for (const auto& r : rows) {
            Json fams = Json::array();
            for (const auto& f : r.families) fams.push_back(f);
            j.push_back(Json{{"pair", Json::array({r.pair.first, r.pair.second})}, {"families", fams}});
        }
        std::cout << dump_json(j);
    } else {
        std::cout << table_markdown(rows);
    }
    return 0;
}

int cmd_selftest(const SelftestOptions& opts, bool json) {
    auto results = run_selftest(opts);
    bool all = true;
    Json j = Json::array();
    for (const auto& r : results) {
        all = all && r.pass;
        if (json)
            j.push_back(Json{{"suite", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        else
            std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << (r.detail.empty() ? "" : "  (" + r.detail + ")")
                      << "\n";
    }
    if (json) std::cout << dump_json(j);
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic invariants and normal forms of two-branch plane curve germs"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "machine-readable output");

    auto* inv = app.add_subcommand("invariants", "value semigroup and differential value sets");
    std::string inv_input;
    bool inv_witnesses = false;
    inv->add_option("input", inv_input, "bigerm file or - for stdin")->required();
    inv->add_flag("--witnesses", inv_witnesses, "include witness forms");

    auto* nform = app.add_subcommand("normal-form", "reduced normal form and classification");
    std::string nf_input;
    nform->add_option("input", nf_input, "bigerm file or - for stdin")->required();

    auto* equiv = app.add_subcommand("equiv", "decide analytic equivalence of two bigerms");
    std::string eq_a, eq_b;
    equiv->add_option("inputA", eq_a)->required();
    equiv->add_option("inputB", eq_b)->required();

    auto* table = app.add_subcommand("table", "normal-form families for the small multiplicity pairs");
    TableOptions topts;
    std::vector<std::string> pair_texts;
    table->add_option("--pairs", pair_texts, "multiplicity pairs like 2,3 (default: all up to (3,3))");
    table->add_option("--seed", topts.seed, "sampling seed");
    table->add_option("--samples", topts.samples, "sampling budget per row");

    auto* self = app.add_subcommand("selftest", "run the module invariant suites");
    SelftestOptions sopts;
    self->add_option("--seed", sopts.seed, "seed");
    bool quick = false;
    self->add_flag("--quick", quick, "reduced sample counts");
    self->add_option("--inject-fault", sopts.inject_fault)->group("");  // hidden, for tests

    CLI11_PARSE(app, argc, argv);

    try {
        if (*inv) return cmd_invariants(inv_input, json, inv_witnesses);
        if (*nform) return cmd_normal_form(nf_input, json);
        if (*equiv) return cmd_equiv(eq_a, eq_b, json);
        if (*table) {
            if (!pair_texts.empty()) {
                topts.pairs.clear();
                for (const auto& p : pair_texts) {
                    auto comma = p.find(',');
                    if (comma == std::string::npos) throw Error("bad pair \"" + p + "\" (expected like 2,3)");
                    topts.pairs.emplace_back(std::stoi(p.substr(0, comma)), std::stoi(p.substr(comma + 1)));
                }
            }
            return cmd_table(topts, json);
        }
        if (*self) {
            sopts.quick = quick;
            return cmd_selftest(sopts, json);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
