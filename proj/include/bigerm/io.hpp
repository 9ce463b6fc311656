#pragma once

#include <string>

#include "json.hpp"

#include "bigerm/equivalence.hpp"

namespace bigerm {

using Json = nlohmann::json;

Rat parse_rational(const std::string& text);
UniSeries parse_uniseries(const std::string& text, Var v);
BiPoly parse_bipoly(const std::string& text);

// Text block format:
//   delta: 2
//   branch1: x = t^2, y = t^5 + 1/2*t^7
//   branch2: x = t^3, y = t^7
// or the JSON equivalent with the same field names.
Bigerm parse_bigerm(const std::string& text);
Bigerm load_bigerm(const std::string& path_or_dash);

std::string format_series(const UniSeries& s, const std::string& var);
std::string format_bipoly(const BiPoly& p);
std::string format_witness(const Witness& w);

Json value_set_json(const ValueSet& v);
Json invariants_json(const BigermInvariants& inv, bool include_witnesses);
Json normal_form_json(const NormalForm& nf);
Json verdict_json(const Verdict& v);

std::string render_normal_form(const NormalForm& nf);

std::string dump_json(const Json& j);  // stable, 2-space indent, trailing newline

}  // namespace bigerm
