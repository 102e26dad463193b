#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "invctl/classify.hpp"
#include "invctl/dp.hpp"
#include "invctl/errors.hpp"
#include "invctl/model.hpp"
#include "invctl/tabulated.hpp"

namespace invctl {

struct NeverOrder {
  friend bool operator==(const NeverOrder&, const NeverOrder&) = default;
};

/// Explicit state -> order quantity map on [first, first + size).
struct ActionTable {
  int first = 0;
  std::vector<int> actions;

  Interval domain() const { return {first, first + static_cast<int>(actions.size()) - 1}; }
  friend bool operator==(const ActionTable&, const ActionTable&) = default;
};

/// Per-step decision rule. Thresholds order up to S when x < s.
using Rule = std::variant<NeverOrder, Thresholds, ActionTable>;

inline int order_quantity(const Rule& rule, int x) {
  return std::visit(
      [x](const auto& r) -> int {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, NeverOrder>) {
          return 0;
        } else if constexpr (std::is_same_v<R, Thresholds>) {
          return x < r.s ? r.S - x : 0;
        } else {
          if (!r.domain().contains(x))
            throw CoverageError("action table does not cover state " + std::to_string(x));
          return r.actions[static_cast<std::size_t>(x - r.first)];
        }
      },
      rule);
}

/// Markov deterministic policy. A finite policy has one rule per step; an
/// infinite one has a single stationary rule.
class Policy {
 public:
  Policy(Horizon horizon, std::vector<Rule> rules) : horizon_(horizon), rules_(std::move(rules)) {
    const std::size_t expected =
        horizon_.is_infinite() ? 1 : static_cast<std::size_t>(horizon_.steps());
    if (rules_.size() != expected)
      throw std::invalid_argument("policy needs one rule per step (one for infinite horizon)");
    for (const auto& r : rules_) {
      if (const auto* th = std::get_if<Thresholds>(&r); th && th->s > th->S)
        throw std::invalid_argument("threshold rule needs s <= S");
      if (const auto* tab = std::get_if<ActionTable>(&r))
        for (int a : tab->actions)
          if (a < 0) throw std::invalid_argument("action table entries must be non-negative");
    }
  }

  static Policy stationary(Rule rule) { return Policy(Horizon::infinite(), {std::move(rule)}); }

  Horizon horizon() const noexcept { return horizon_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const Rule& rule(int step) const {
    return horizon_.is_infinite() ? rules_.front() : rules_.at(static_cast<std::size_t>(step));
  }
  Policy with_rule(int step, Rule r) const {
    auto rules = rules_;
    rules.at(static_cast<std::size_t>(step)) = std::move(r);
    return Policy(horizon_, std::move(rules));
  }
  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  Horizon horizon_;
  std::vector<Rule> rules_;
};

namespace detail {
inline void check_covers(const Policy& pol, int N) {
  if (!pol.horizon().is_infinite() && pol.horizon().steps() != N)
    throw CoverageError("policy horizon " + std::to_string(pol.horizon().steps()) +
                        " does not match N = " + std::to_string(N));
}
}  // namespace detail

/// Exact expected discounted N-step cost of `pol` from x0, by backward
/// policy evaluation over the states reachable from x0.
template <typename Scalar>
Scalar evaluate_exact(const Problem<Scalar>& p, const Policy& pol, int x0, int N) {
  if (N < 0) throw std::domain_error("evaluate_exact: N must be non-negative");
  detail::check_covers(pol, N);
  if (N == 0) return Scalar(0);

  const int d_min = p.demand.min_value(), d_max = p.demand.max_value();
  std::vector<Interval> reach{{x0, x0}};
  std::vector<std::vector<int>> acts;
  for (int t = 0; t < N; ++t) {
    const Interval r = reach.back();
    std::vector<int> a(static_cast<std::size_t>(r.size()));
    int y_lo = INT32_MAX, y_hi = INT32_MIN;
    for (int x = r.lo; x <= r.hi; ++x) {
      const int q = order_quantity(pol.rule(t), x);
      a[static_cast<std::size_t>(x - r.lo)] = q;
      y_lo = std::min(y_lo, x + q);
      y_hi = std::max(y_hi, x + q);
    }
    acts.push_back(std::move(a));
    reach.push_back({y_lo - d_max, y_hi - d_min});
  }

  Tabulated<Scalar> next = Tabulated<Scalar>::from(reach[static_cast<std::size_t>(N)],
                                                   [](int) { return Scalar(0); });
  for (int t = N - 1; t >= 0; --t) {
    const Interval r = reach[static_cast<std::size_t>(t)];
    const auto& a = acts[static_cast<std::size_t>(t)];
    next = Tabulated<Scalar>::from(r, [&](int x) {
      const int q = a[static_cast<std::size_t>(x - r.lo)];
      const Scalar future = p.demand.expect([&](int d) { return next(x + q - d); });
      return one_step_cost(p, x, q) + p.alpha * future;
    });
  }
  return next(x0);
}

/// Optimal N-step policy from a value table: step t follows the rule of DP
/// stage N - t - 1. A stage whose optimal actions do not follow its
/// threshold rule is emitted as an action table over its exact range.
template <typename Scalar>
Policy induced_policy(const ValueTable<Scalar>& vt) {
  const int N = vt.horizon();
  std::vector<Rule> rules;
  rules.reserve(static_cast<std::size_t>(N));
  for (int t = 0; t < N; ++t) {
    const auto& stage = vt.stages.at(static_cast<std::size_t>(N - t - 1));
    if (!stage.rule_exact) {
      const auto from = stage.action.begin() + (stage.G_lo - vt.window.lo);
      rules.emplace_back(ActionTable{stage.G_lo, std::vector<int>(from, stage.action.end())});
    } else if (stage.thresholds) {
      rules.emplace_back(*stage.thresholds);
    } else {
      rules.emplace_back(NeverOrder{});
    }
  }
  return Policy(Horizon::finite(N), std::move(rules));
}

struct SimResult {
  double mean_cost = 0;
  double std_error = 0;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> path_costs;          // only when requested
  std::optional<double> truncation_bound;  // infinite-horizon policies
};

struct SimOptions {
  int workers = 1;
  bool keep_paths = false;
  // Per-step expected cost bound (M3) for truncating stationary policies.
  std::optional<double> tail_cost_bound;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream seed for one path, independent of how paths are split across workers.
inline std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
  return splitmix64(seed ^ splitmix64(path));
}
}  // namespace detail

/// Monte Carlo estimate of the discounted N-step cost. Demand is drawn by
/// inverse CDF from mt19937_64 streams seeded per path, so results are
/// bit-reproducible for any worker count.
template <typename Scalar>
SimResult simulate(const Problem<Scalar>& p, const Policy& pol, int x0, int N,
                   std::int64_t n_paths, std::uint64_t seed, SimOptions opts = {}) {
  if (n_paths < 1) throw std::domain_error("simulate: n_paths must be at least 1");
  if (N < 0) throw std::domain_error("simulate: N must be non-negative");
  detail::check_covers(pol, N);

  std::vector<int> values;
  std::vector<double> cdf;
  double acc = 0;
  for (const auto& [v, prob] : p.demand.atoms()) {
    values.push_back(v);
    acc += static_cast<double>(prob);
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;

  std::vector<double> costs(static_cast<std::size_t>(n_paths));
  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      std::mt19937_64 eng(detail::path_seed(seed, static_cast<std::uint64_t>(i)));
      double total = 0, discount = 1;
      int x = x0;
      for (int t = 0; t < N; ++t) {
        const int a = order_quantity(pol.rule(t), x);
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        const auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const int d = values[std::min(k, values.size() - 1)];
        const int y = x + a;
        total += discount * static_cast<double>((a > 0 ? p.K : Scalar(0)) + p.c_bar * Scalar(a) + p.h(y - d));
        discount *= static_cast<double>(p.alpha);
        x = y - d;
      }
      costs[static_cast<std::size_t>(i)] = total;
    }
  };

  const int workers = std::max(1, opts.workers);
  if (workers == 1) {
    run_range(0, n_paths);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> pool;
      const std::int64_t chunk = (n_paths + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const std::int64_t b = w * chunk, e = std::min(n_paths, b + chunk);
        if (b < e)
          pool.emplace_back([&, w, b, e] {
            try {
              run_range(b, e);
            } catch (...) {
              errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
          });
      }
    }
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  SimResult r;
  r.n_paths = n_paths;
  r.seed = seed;
  double sum = 0;
  for (double c : costs) sum += c;
  r.mean_cost = sum / static_cast<double>(n_paths);
  if (n_paths > 1) {
    double ss = 0;
    for (double c : costs) ss += (c - r.mean_cost) * (c - r.mean_cost);
    r.std_error = std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths));
  }
  if (pol.horizon().is_infinite() && opts.tail_cost_bound) {
    const double alpha = static_cast<double>(p.alpha);
    r.truncation_bound = std::pow(alpha, N) * *opts.tail_cost_bound / (1 - alpha);
  }
  if (opts.keep_paths) r.path_costs = std::move(costs);
  return r;
}

}  // namespace invctl
