#include "invctl/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "invctl/classify.hpp"
#include "invctl/dp.hpp"
#include "invctl/io.hpp"
#include "invctl/policy.hpp"
#include "invctl/sweep.hpp"
#include "invctl/verify.hpp"

namespace invctl::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

// Bad flag values and unreadable files; mapped to exit_bad_input.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

Horizon parse_horizon(const std::string& s) {
  if (s == "inf") return Horizon::infinite();
  try {
    std::size_t used = 0;
    const int n = std::stoi(s, &used);
    if (used == s.size() && n >= 0) return Horizon::finite(n);
  } catch (const std::exception&) {
  }
  throw InputError("--horizon expects a non-negative integer or 'inf', got '" + s + "'");
}

Interval parse_query(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon != std::string::npos) {
      const Interval q{std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
      if (!q.empty()) return q;
    }
  } catch (const std::exception&) {
  }
  throw InputError("--query expects lo:hi with lo <= hi, got '" + s + "'");
}

Problem<double> load_problem(const std::string& path, std::optional<double> alpha) {
  auto p = io::parse_problem(read_file(path));
  return alpha ? p.with_alpha(*alpha) : p;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  } catch (const std::exception&) {
    throw InputError("expected a comma-separated list of numbers, got '" + s + "'");
  }
  return out;
}

struct Common {
  std::string spec;
  std::optional<double> alpha;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("spec", c.spec, "Problem spec JSON file")->required();
  cmd->add_option("--alpha", c.alpha, "Discount factor (overrides the spec)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solver and structure classifier for (s,S) inventory control"};
  app.require_subcommand(1);

  Common common;
  std::string horizon_arg = "inf";
  std::string query_arg = "-10:10";
  std::string out_dir = ".";
  double tol = 1e-6;

  auto* classify_cmd = app.add_subcommand("classify", "Report alpha*, N_alpha and the policy structure");
  add_common(classify_cmd, common);
  classify_cmd->add_option("--horizon", horizon_arg, "Horizon: N or inf")->capture_default_str();

  auto* solve_cmd = app.add_subcommand("solve", "Solve and write values.csv, policy.json, report.json");
  add_common(solve_cmd, common);
  solve_cmd->add_option("--horizon", horizon_arg, "Horizon: N or inf")->required();
  solve_cmd->add_option("--query", query_arg, "State window lo:hi")->capture_default_str();
  solve_cmd->add_option("--tol", tol, "Infinite-horizon error tolerance")->capture_default_str();
  solve_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string policy_file;
  int x0 = 0;
  std::optional<std::string> sim_horizon;
  std::int64_t paths = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo cost of a policy");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--policy", policy_file, "Policy JSON file")->required();
  sim_cmd->add_option("--x0", x0, "Initial inventory")->capture_default_str();
  sim_cmd->add_option("--horizon", sim_horizon, "Steps to simulate (defaults to the policy horizon)");
  sim_cmd->add_option("--paths", paths, "Number of sample paths")->capture_default_str();
  sim_cmd->add_option("--seed", seed, "PRNG seed")->capture_default_str();
  sim_cmd->add_option("--workers", workers, "Worker threads")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "Run structural self-checks on an instance");
  add_common(verify_cmd, common);
  std::string verify_horizon = "5";
  std::string verify_query = "-6:6";
  verify_cmd->add_option("--horizon", verify_horizon, "Finite horizon N")->capture_default_str();
  verify_cmd->add_option("--query", verify_query, "State window lo:hi")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "Regime diagram over alpha and k_h/c_bar");
  add_common(sweep_cmd, common);
  std::string ratios_arg = "0.5,1,2";
  double alpha_step = 0.01, alpha_max = 0.99;
  std::string sweep_horizon = "10";
  sweep_cmd->add_option("--ratios", ratios_arg, "k_h/c_bar values")->capture_default_str();
  sweep_cmd->add_option("--alpha-step", alpha_step, "Alpha grid step")->capture_default_str();
  sweep_cmd->add_option("--alpha-max", alpha_max, "Largest alpha (< 1)")->capture_default_str();
  sweep_cmd->add_option("--horizon", sweep_horizon, "Finite horizon N")->capture_default_str();
  sweep_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return exit_bad_input;
  }

  try {
    if (*classify_cmd) {
      const auto p = load_problem(common.spec, common.alpha);
      out << io::to_json(classify(p, parse_horizon(horizon_arg))).dump() << '\n';
      return exit_ok;
    }

    if (*solve_cmd) {
      const auto p = load_problem(common.spec, common.alpha);
      const auto horizon = parse_horizon(horizon_arg);
      const auto query = parse_query(query_arg);
      const auto report = classify(p, horizon);
      fs::create_directories(out_dir);
      json rep = io::to_json(report);
      std::ostringstream values;
      if (horizon.is_infinite()) {
        const auto sol = value_iteration(p, query, tol);
        io::write_values_csv(values, sol);
        const Policy pol = Policy::stationary(sol.thresholds ? Rule{*sol.thresholds} : Rule{NeverOrder{}});
        write_file(fs::path(out_dir) / "policy.json", io::to_json(pol).dump(2) + "\n");
        rep["error_bound"] = sol.error_bound;
        rep["terms"] = sol.terms;
        if (sol.structure == Structure::ss_stationary) rep["tail_cost_bound"] = sol.tail_cost_bound;
        if (sol.thresholds) rep["thresholds"] = {{"s", sol.thresholds->s}, {"S", sol.thresholds->S}};
      } else {
        const auto vt = solve_finite(p, horizon.steps(), query);
        io::write_values_csv(values, vt);
        write_file(fs::path(out_dir) / "policy.json", io::to_json(induced_policy(vt)).dump(2) + "\n");
        rep["window"] = {vt.window.lo, vt.window.hi};
      }
      rep["query"] = {query.lo, query.hi};
      write_file(fs::path(out_dir) / "values.csv", values.str());
      write_file(fs::path(out_dir) / "report.json", rep.dump(2) + "\n");
      out << rep.dump() << '\n';
      return exit_ok;
    }

    if (*sim_cmd) {
      const auto p = load_problem(common.spec, common.alpha);
      const auto pol = io::policy_from_json([&] {
        try {
          return json::parse(read_file(policy_file));
        } catch (const json::parse_error& e) {
          throw SpecError(std::string("malformed policy JSON: ") + e.what());
        }
      }());
      int N = 0;
      if (sim_horizon) {
        const auto h = parse_horizon(*sim_horizon);
        if (h.is_infinite()) throw InputError("--horizon for simulate must be finite");
        N = h.steps();
      } else if (pol.horizon().is_infinite()) {
        throw InputError("--horizon is required for stationary policies");
      } else {
        N = pol.horizon().steps();
      }
      SimOptions opts;
      opts.workers = workers;
      out << io::to_json(simulate(p, pol, x0, N, paths, seed, opts)).dump() << '\n';
      return exit_ok;
    }

    if (*verify_cmd) {
      const auto p = load_problem(common.spec, common.alpha);
      const auto h = parse_horizon(verify_horizon);
      if (h.is_infinite()) throw InputError("verify needs a finite --horizon");
      const auto checks = verify_instance(p, h.steps(), parse_query(verify_query));
      json arr = json::array();
      bool ok = true;
      for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
        if (c.status == CheckResult::Status::fail) {
          ok = false;
          err << "check failed: " << c.name << ": " << c.detail << '\n';
        }
      }
      out << json{{"passed", ok}, {"checks", arr}}.dump(2) << '\n';
      return ok ? exit_ok : exit_check_failed;
    }

    if (*sweep_cmd) {
      const auto p = load_problem(common.spec, common.alpha);
      if (!(alpha_step > 0) || !(alpha_max < 1) || alpha_max < 0)
        throw InputError("sweep needs alpha-step > 0 and 0 <= alpha-max < 1");
      const auto h = parse_horizon(sweep_horizon);
      if (h.is_infinite()) throw InputError("sweep needs a finite --horizon");
      const auto rows = regime_sweep(p, parse_list(ratios_arg), alpha_step, alpha_max, h.steps());
      std::ostringstream csv;
      io::write_sweep_csv(csv, rows);
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "sweep.csv", csv.str());
      out << csv.str();
      return exit_ok;
    }
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return exit_bad_input;
  } catch (const CoverageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_policy_mismatch;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_infinite_alpha;
  }
  return exit_bad_input;
}

}  // namespace invctl::cli
