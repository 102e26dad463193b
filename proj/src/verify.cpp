#include "invctl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invctl/classify.hpp"
#include "invctl/dp.hpp"
#include "invctl/oracle.hpp"
#include "invctl/policy.hpp"

namespace invctl {

const char* to_string(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::pass: return "pass";
    case CheckResult::Status::fail: return "fail";
    case CheckResult::Status::skipped: return "skipped";
  }
  return "?";
}

namespace {

using Status = CheckResult::Status;

CheckResult make(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? Status::pass : Status::fail, std::move(detail)};
}

CheckResult oracle_agreement(const Problem<double>& p, int N, Interval query) {
  const int n = std::min(N, 3);
  if (n < 1) return {"oracle_agreement", Status::skipped, "horizon is zero"};
  Interval window = query;
  if (window.size() > 20) {
    const int mid = query.lo + query.size() / 2;
    window = {mid - 10, mid + 9};
  }
  const auto brute = brute_force_optimal(p, n, window, 15);
  if (brute.saturated)
    return {"oracle_agreement", Status::skipped, "order cap of the oracle binds on this instance"};
  const auto vt = solve_finite(p, n, window);
  double worst = 0;
  for (int t = 1; t <= n; ++t)
    for (int x = window.lo; x <= window.hi; ++x)
      worst = std::max(worst, std::abs(vt.v(t, x) - brute.value(t, x)));
  std::ostringstream d;
  d << "N=" << n << " window=[" << window.lo << "," << window.hi << "] max_abs_diff=" << worst;
  return make("oracle_agreement", worst < 1e-9, d.str());
}

}  // namespace

std::vector<CheckResult> verify_instance(const Problem<double>& p, int N, Interval query) {
  std::vector<CheckResult> out;
  try {
    out.push_back(oracle_agreement(p, N, query));
  } catch (const OracleSizeError& e) {
    out.push_back({"oracle_agreement", Status::skipped, e.what()});
  }

  const auto vt = solve_finite(p, N, query);
  const double tol = tolerance::value;

  {
    std::ostringstream d;
    bool ok = true;
    for (int t = 0; t < N; ++t) {
      const auto& st = vt.stages[static_cast<std::size_t>(t)];
      for (int x = st.G_lo; x <= vt.window.hi; ++x) {
        const int a = vt.action(t, x);
        const int expected = st.thresholds ? (x < st.thresholds->s ? st.thresholds->S - x : 0) : 0;
        if (a != expected) {
          if (ok) d << "stage " << t << " x=" << x << " action " << a << " expected " << expected;
          ok = false;
        }
      }
    }
    const auto report = classify(p, Horizon::finite(N));
    const auto pol = induced_policy(vt);
    int ordering_steps = 0;
    for (const auto& r : pol.rules()) ordering_steps += std::holds_alternative<Thresholds>(r) ? 1 : 0;
    if (ordering_steps != report.order_steps_end) {
      if (ok) d << "induced policy orders at " << ordering_steps << " steps, classification says "
                << report.order_steps_end;
      ok = false;
    }
    if (ok) d << "structure " << to_string(report.structure) << ", ordering steps " << ordering_steps;
    out.push_back(make("policy_structure", ok, d.str()));
  }

  {
    std::ostringstream d;
    bool ok = true;
    for (int t = 0; t <= N; ++t) {
      const auto g = vt.G_table(t);
      if (vt.stages[static_cast<std::size_t>(t)].ordering) {
        const auto r = check_k_convex(g, p.K);
        if (!r.holds) {
          if (ok) d << "G_" << t << " not K-convex at (" << r.witness->x << "," << r.witness->m << ","
                    << r.witness->y << ")";
          ok = false;
        }
      } else if (!is_convex(g)) {
        if (ok) d << "G_" << t << " not convex in a never-order stage";
        ok = false;
      }
    }
    out.push_back(make("k_convexity", ok, ok ? "all stages" : d.str()));
  }

  {
    const auto r = verify_Gf_identity(p, N, query);
    std::ostringstream d;
    d << "t<=" << r.last_stage_checked << " max_abs_diff=" << r.max_abs_diff;
    out.push_back(make("gf_identity", r.holds, d.str()));
  }

  {
    bool ok = true;
    for (int t = 0; t < N; ++t)
      for (int x = vt.stages[static_cast<std::size_t>(t + 1)].v_lo; x <= vt.window.hi; ++x)
        if (vt.v(t, x) > vt.v(t + 1, x) + tol) ok = false;
    out.push_back(make("monotone_values", ok, "v_t <= v_{t+1} on exact ranges"));
  }

  const auto pol = induced_policy(vt);
  {
    double worst = 0;
    for (int x = query.lo; x <= query.hi; ++x)
      worst = std::max(worst, std::abs(evaluate_exact(p, pol, x, N) - vt.v(N, x)));
    std::ostringstream d;
    d << "max_abs_diff=" << worst;
    out.push_back(make("policy_optimality", worst < tol, d.str()));
  }

  {
    // Not ordering at s_t must be optimal; ordering up to S_t there may cost
    // more on the integer lattice, and the largest such gap is reported.
    double worst_gain = 0, largest_gap = 0;
    for (int t = 0; t < N; ++t) {
      const auto* th = std::get_if<Thresholds>(&pol.rule(t));
      if (!th) continue;
      const auto swapped = pol.with_rule(t, Thresholds{std::min(th->s + 1, th->S), th->S});
      for (int x = query.lo; x <= query.hi; ++x) {
        const double delta = evaluate_exact(p, swapped, x, N) - evaluate_exact(p, pol, x, N);
        worst_gain = std::max(worst_gain, -delta);
        largest_gap = std::max(largest_gap, delta);
      }
    }
    std::ostringstream d;
    d << "ordering at s_t never helps; largest cost increase from ordering there " << largest_gap;
    out.push_back(make("boundary_action", worst_gain < tol, d.str()));
  }
  return out;
}

}  // namespace invctl
