#pragma once

// JSON and CSV formats for problem specs, reports, policies, simulation
// results, value tables and regime sweeps.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "invctl/classify.hpp"
#include "invctl/dp.hpp"
#include "invctl/model.hpp"
#include "invctl/policy.hpp"
#include "invctl/sweep.hpp"

namespace invctl::io {

using nlohmann::json;

// Problem spec: {"K", "c_bar", "h": {"breakpoints", "slopes"}, "demand": {"<int>": p}, "alpha"}.
// Throws SpecError on malformed JSON or invalid data.
Problem<double> parse_problem(std::string_view text);
Problem<double> problem_from_json(const json& j);
json to_json(const Problem<double>& p);

json to_json(const StructureReport<double>& r);
StructureReport<double> report_from_json(const json& j);

json to_json(const Policy& pol);
Policy policy_from_json(const json& j);

json to_json(const SimResult& r);
SimResult sim_result_from_json(const json& j);

// Rows t, x, v, G, action, s, S. The decision columns describe the rule that
// attains v_t, i.e. the one derived from G_{t-1}; they are empty at t = 0 and
// in never-order stages (thresholds only).
void write_values_csv(std::ostream& out, const ValueTable<double>& vt);
void write_values_csv(std::ostream& out, const InfiniteSolution<double>& sol);
json values_to_json(const ValueTable<double>& vt);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

std::string format_number(double v);
Structure structure_from_string(std::string_view s);

}  // namespace invctl::io
