#include "invctl/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace invctl::io {

namespace {

json count_or_inf(const std::optional<int>& n) {
  return n ? json(*n) : json("inf");
}

std::optional<int> count_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "inf") throw SpecError("expected integer or \"inf\"");
    return std::nullopt;
  }
  return j.get<int>();
}

Horizon horizon_from_json(const json& j) {
  const auto n = count_from_json(j);
  return n ? Horizon::finite(*n) : Horizon::infinite();
}

json horizon_to_json(const Horizon& h) {
  return h.is_infinite() ? json("inf") : json(h.steps());
}

std::string cell(double v) { return format_number(v); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Structure structure_from_string(std::string_view s) {
  if (s == "SS_ALL_STEPS") return Structure::ss_all_steps;
  if (s == "NEVER_ORDER") return Structure::never_order;
  if (s == "HYBRID") return Structure::hybrid;
  if (s == "SS_STATIONARY") return Structure::ss_stationary;
  throw SpecError("unknown structure '" + std::string(s) + "'");
}

Problem<double> problem_from_json(const json& j) {
  try {
    const auto& hj = j.at("h");
    PLConvex<double> h(hj.at("breakpoints").get<std::vector<int>>(),
                       hj.at("slopes").get<std::vector<double>>());
    std::vector<Pmf<double>::Atom> atoms;
    for (const auto& [key, prob] : j.at("demand").items()) {
      int value = 0;
      const auto* end = key.data() + key.size();
      auto [ptr, ec] = std::from_chars(key.data(), end, value);
      if (ec != std::errc() || ptr != end) throw SpecError("demand key '" + key + "' is not an integer");
      atoms.emplace_back(value, prob.get<double>());
    }
    return Problem<double>(j.at("K").get<double>(), j.at("c_bar").get<double>(), std::move(h),
                           Pmf<double>(std::move(atoms)), j.value("alpha", 0.0));
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed problem spec: ") + e.what());
  }
}

Problem<double> parse_problem(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("malformed JSON: ") + e.what());
  }
  return problem_from_json(j);
}

json to_json(const Problem<double>& p) {
  json demand = json::object();
  for (const auto& [v, prob] : p.demand.atoms()) demand[std::to_string(v)] = prob;
  return {{"K", p.K},
          {"c_bar", p.c_bar},
          {"h", {{"breakpoints", p.h.breakpoints()}, {"slopes", p.h.slopes()}}},
          {"demand", demand},
          {"alpha", p.alpha}};
}

json to_json(const StructureReport<double>& r) {
  json j = {{"alpha", r.alpha},
            {"alpha_star", r.alpha_star},
            {"N_alpha", count_or_inf(r.n_alpha)},
            {"condition1", r.condition1},
            {"horizon", horizon_to_json(r.horizon)}};
  if (r.structure == Structure::hybrid)
    j["structure"] = {{"HYBRID", {{"order_steps_end", r.order_steps_end}}}};
  else
    j["structure"] = to_string(r.structure);
  j["infinite_structure"] = r.infinite_structure ? to_string(*r.infinite_structure) : "UNDEFINED";
  return j;
}

StructureReport<double> report_from_json(const json& j) {
  StructureReport<double> r;
  r.alpha = j.at("alpha").get<double>();
  r.alpha_star = j.at("alpha_star").get<double>();
  r.n_alpha = count_from_json(j.at("N_alpha"));
  r.condition1 = j.at("condition1").get<bool>();
  r.horizon = horizon_from_json(j.at("horizon"));
  const auto& s = j.at("structure");
  if (s.is_object()) {
    r.structure = Structure::hybrid;
    r.order_steps_end = s.at("HYBRID").at("order_steps_end").get<int>();
  } else {
    r.structure = structure_from_string(s.get<std::string>());
    if (r.structure == Structure::ss_all_steps) r.order_steps_end = r.horizon.steps();
  }
  const auto inf = j.at("infinite_structure").get<std::string>();
  if (inf != "UNDEFINED") r.infinite_structure = structure_from_string(inf);
  return r;
}

json to_json(const Policy& pol) {
  json stages = json::array();
  for (const auto& rule : pol.rules()) {
    std::visit(
        [&](const auto& r) {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, NeverOrder>)
            stages.push_back({{"type", "never_order"}});
          else if constexpr (std::is_same_v<R, Thresholds>)
            stages.push_back({{"type", "threshold"}, {"s", r.s}, {"S", r.S}});
          else
            stages.push_back({{"type", "table"}, {"first", r.first}, {"actions", r.actions}});
        },
        rule);
  }
  return {{"horizon", horizon_to_json(pol.horizon())}, {"stages", stages}};
}

Policy policy_from_json(const json& j) {
  try {
    std::vector<Rule> rules;
    for (const auto& s : j.at("stages")) {
      const auto type = s.at("type").get<std::string>();
      if (type == "never_order")
        rules.emplace_back(NeverOrder{});
      else if (type == "threshold")
        rules.emplace_back(Thresholds{s.at("s").get<int>(), s.at("S").get<int>()});
      else if (type == "table")
        rules.emplace_back(ActionTable{s.at("first").get<int>(), s.at("actions").get<std::vector<int>>()});
      else
        throw SpecError("unknown rule type '" + type + "'");
    }
    return Policy(horizon_from_json(j.at("horizon")), std::move(rules));
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed policy: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("invalid policy: ") + e.what());
  }
}

json to_json(const SimResult& r) {
  json j = {{"mean_cost", r.mean_cost},
            {"std_error", r.std_error},
            {"n_paths", r.n_paths},
            {"seed", r.seed}};
  if (r.truncation_bound) j["truncation_bound"] = *r.truncation_bound;
  if (!r.path_costs.empty()) j["path_costs"] = r.path_costs;
  return j;
}

SimResult sim_result_from_json(const json& j) {
  SimResult r;
  r.mean_cost = j.at("mean_cost").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.n_paths = j.at("n_paths").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("truncation_bound")) r.truncation_bound = j["truncation_bound"].get<double>();
  if (j.contains("path_costs")) r.path_costs = j["path_costs"].get<std::vector<double>>();
  return r;
}

void write_values_csv(std::ostream& out, const ValueTable<double>& vt) {
  out << "t,x,v,G,action,s_t,S_t\n";
  for (int t = 0; t <= vt.horizon(); ++t) {
    const auto* prev = t > 0 ? &vt.stages[static_cast<std::size_t>(t - 1)] : nullptr;
    for (int x = vt.query.lo; x <= vt.query.hi; ++x) {
      out << t << ',' << x << ',' << cell(vt.v(t, x)) << ',' << cell(vt.G(t, x)) << ',';
      if (prev) out << vt.action(t - 1, x);
      out << ',';
      if (prev && prev->thresholds) out << prev->thresholds->s << ',' << prev->thresholds->S;
      else out << ',';
      out << '\n';
    }
  }
}

void write_values_csv(std::ostream& out, const InfiniteSolution<double>& sol) {
  out << "t,x,v,G,action,s_t,S_t\n";
  for (int x = sol.query.lo; x <= sol.query.hi; ++x) {
    const int a = sol.thresholds ? order_quantity(*sol.thresholds, x) : 0;
    out << "inf," << x << ',' << cell(sol.v(x)) << ',' << cell(sol.G(x)) << ',' << a << ',';
    if (sol.thresholds) out << sol.thresholds->s << ',' << sol.thresholds->S;
    else out << ',';
    out << '\n';
  }
}

json values_to_json(const ValueTable<double>& vt) {
  json rows = json::array();
  for (int t = 0; t <= vt.horizon(); ++t) {
    const auto* prev = t > 0 ? &vt.stages[static_cast<std::size_t>(t - 1)] : nullptr;
    for (int x = vt.query.lo; x <= vt.query.hi; ++x) {
      json row = {{"t", t}, {"x", x}, {"v", vt.v(t, x)}, {"G", vt.G(t, x)},
                  {"action", nullptr}, {"s_t", nullptr}, {"S_t", nullptr}};
      if (prev) row["action"] = vt.action(t - 1, x);
      if (prev && prev->thresholds) {
        row["s_t"] = prev->thresholds->s;
        row["S_t"] = prev->thresholds->S;
      }
      rows.push_back(std::move(row));
    }
  }
  return {{"window", {vt.window.lo, vt.window.hi}}, {"query", {vt.query.lo, vt.query.hi}}, {"rows", rows}};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "ratio,alpha,alpha_star,N_alpha,horizon,finite_structure,order_steps_end,infinite_structure\n";
  for (const auto& r : rows) {
    out << cell(r.ratio) << ',' << cell(r.alpha) << ',' << cell(r.alpha_star) << ','
        << (r.n_alpha ? std::to_string(*r.n_alpha) : "inf") << ',' << r.horizon << ','
        << to_string(r.finite) << ',' << r.order_steps_end << ',' << to_string(r.infinite) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw SpecError("sweep.csv: expected 8 columns");
    SweepRow r;
    r.ratio = std::stod(f[0]);
    r.alpha = std::stod(f[1]);
    r.alpha_star = std::stod(f[2]);
    if (f[3] != "inf") r.n_alpha = std::stoi(f[3]);
    r.horizon = std::stoi(f[4]);
    r.finite = structure_from_string(f[5]);
    r.order_steps_end = std::stoi(f[6]);
    r.infinite = structure_from_string(f[7]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace invctl::io
