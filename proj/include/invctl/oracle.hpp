#pragma once

// Brute-force ground truth for tiny instances. Deliberately does not use the
// G_t factorization or threshold structure: every action is scored by a
// direct sum over demand outcomes.

#include <algorithm>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "invctl/errors.hpp"
#include "invctl/model.hpp"
#include "invctl/policy.hpp"
#include "invctl/tabulated.hpp"

namespace invctl {

template <typename Scalar = double>
struct BruteForceResult {
  Interval window;
  int a_max = 0;
  // values[n] / actions[n]: optimal cost and smallest optimal order with n
  // steps to go, on the window. values[0] is identically zero.
  std::vector<Vector<Scalar>> values;
  std::vector<std::vector<int>> actions;
  bool saturated = false;  // some optimal order reached a_max

  Scalar value(int steps_to_go, int x) const { return values.at(steps_to_go)(x - window.lo); }
  int action(int steps_to_go, int x) const {
    return actions.at(steps_to_go).at(static_cast<std::size_t>(x - window.lo));
  }
  // Step t of an N-step problem acts with N - t steps to go.
  Policy best_policy() const {
    const int N = static_cast<int>(values.size()) - 1;
    std::vector<Rule> rules;
    for (int t = 0; t < N; ++t) rules.emplace_back(ActionTable{window.lo, actions.at(N - t)});
    return Policy(Horizon::finite(N), std::move(rules));
  }
};

namespace detail {

template <typename Scalar>
class BruteForce {
 public:
  BruteForce(const Problem<Scalar>& p, int a_max) : p_(p), a_max_(a_max) {}

  std::pair<Scalar, int> solve(int steps_to_go, int x) {
    if (steps_to_go == 0) return {Scalar(0), 0};
    const auto key = std::make_pair(steps_to_go, x);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    int best_a = 0;
    for (int a = 0; a <= a_max_; ++a) {
      Scalar total(0);
      for (const auto& [d, prob] : p_.demand.atoms()) {
        const int next = x + a - d;
        const Scalar stage = (a > 0 ? p_.K : Scalar(0)) + p_.c_bar * Scalar(a) + p_.h(next);
        total += prob * (stage + p_.alpha * solve(steps_to_go - 1, next).first);
      }
      if (total < best - Scalar(tolerance::value)) {
        best = total;
        best_a = a;
      } else if (total < best) {
        best = total;  // keep the smaller action on near-ties
      }
    }
    return memo_[key] = {best, best_a};
  }

  bool any_saturated() const {
    for (const auto& [key, entry] : memo_)
      if (a_max_ > 0 && entry.second == a_max_) return true;
    return false;
  }

 private:
  const Problem<Scalar>& p_;
  int a_max_;
  std::map<std::pair<int, int>, std::pair<Scalar, int>> memo_;
};

}  // namespace detail

/// Exact optimal values and actions for N <= 3 steps with orders in
/// {0, ..., a_max}, by exhaustive minimization over actions at every state
/// reachable from the window.
template <typename Scalar>
BruteForceResult<Scalar> brute_force_optimal(const Problem<Scalar>& p, int N, Interval window,
                                             int a_max) {
  if (N < 1 || N > 3 || window.empty() || window.size() > 20 || a_max < 0 || a_max > 15)
    throw OracleSizeError("brute_force_optimal: requires 1 <= N <= 3, |window| <= 20, a_max <= 15");
  detail::BruteForce<Scalar> bf(p, a_max);
  BruteForceResult<Scalar> r;
  r.window = window;
  r.a_max = a_max;
  r.values.push_back(Vector<Scalar>::Zero(window.size()));
  r.actions.emplace_back(static_cast<std::size_t>(window.size()), 0);
  for (int n = 1; n <= N; ++n) {
    Vector<Scalar> vals(window.size());
    std::vector<int> acts(static_cast<std::size_t>(window.size()));
    for (int x = window.lo; x <= window.hi; ++x) {
      const auto [v, a] = bf.solve(n, x);
      vals(x - window.lo) = v;
      acts[static_cast<std::size_t>(x - window.lo)] = a;
    }
    r.values.push_back(std::move(vals));
    r.actions.push_back(std::move(acts));
  }
  // Saturation anywhere in the explored tree means a_max may have bound.
  r.saturated = bf.any_saturated();
  return r;
}

struct PolicyCost {
  Policy policy;
  double cost;
};

/// Cost from the window midpoint of every Markov deterministic table policy
/// (distinct on the states it can reach), computed by enumerating demand
/// paths. N in {1, 2}, |window| <= 8; for N = 2 every order from the
/// midpoint must stay inside the window.
template <typename Scalar>
std::vector<PolicyCost> enumerate_policy_costs(const Problem<Scalar>& p, int N, Interval window,
                                               int a_max) {
  if (N < 1 || N > 2 || window.empty() || window.size() > 8 || a_max < 0 || a_max > 15)
    throw OracleSizeError("enumerate_policy_costs: requires N in {1,2}, |window| <= 8, a_max <= 15");
  const int x0 = window.lo + (window.size() - 1) / 2;
  const auto& atoms = p.demand.atoms();
  auto stage_cost = [&](int x, int a, int d) {
    return static_cast<double>((a > 0 ? p.K : Scalar(0)) + p.c_bar * Scalar(a) + p.h(x + a - d));
  };
  const std::vector<int> zeros(static_cast<std::size_t>(window.size()), 0);

  std::vector<PolicyCost> out;
  if (N == 1) {
    for (int a0 = 0; a0 <= a_max; ++a0) {
      auto table = zeros;
      table[static_cast<std::size_t>(x0 - window.lo)] = a0;
      double cost = 0;
      for (const auto& [d, prob] : atoms) cost += static_cast<double>(prob) * stage_cost(x0, a0, d);
      out.push_back({Policy(Horizon::finite(1), {ActionTable{window.lo, table}}), cost});
    }
    return out;
  }

  if (x0 + a_max > window.hi || x0 - p.demand.max_value() < window.lo)
    throw std::invalid_argument("enumerate_policy_costs: window does not cover reachable states");
  const double alpha = static_cast<double>(p.alpha);
  for (int a0 = 0; a0 <= a_max; ++a0) {
    std::vector<int> next_states;
    for (const auto& atom : atoms) next_states.push_back(x0 + a0 - atom.first);
    std::sort(next_states.begin(), next_states.end());
    next_states.erase(std::unique(next_states.begin(), next_states.end()), next_states.end());

    std::vector<int> choice(next_states.size(), 0);
    for (;;) {
      auto t0 = zeros, t1 = zeros;
      t0[static_cast<std::size_t>(x0 - window.lo)] = a0;
      for (std::size_t k = 0; k < next_states.size(); ++k)
        t1[static_cast<std::size_t>(next_states[k] - window.lo)] = choice[k];
      double cost = 0;
      for (const auto& [d1, p1] : atoms) {
        const int x1 = x0 + a0 - d1;
        const auto k = static_cast<std::size_t>(
            std::lower_bound(next_states.begin(), next_states.end(), x1) - next_states.begin());
        for (const auto& [d2, p2] : atoms)
          cost += static_cast<double>(p1 * p2) *
                  (stage_cost(x0, a0, d1) + alpha * stage_cost(x1, choice[k], d2));
      }
      out.push_back({Policy(Horizon::finite(2), {ActionTable{window.lo, t0}, ActionTable{window.lo, t1}}),
                     cost});
      std::size_t k = 0;
      while (k < choice.size() && ++choice[k] > a_max) choice[k++] = 0;
      if (k == choice.size()) break;
    }
  }
  return out;
}

}  // namespace invctl
