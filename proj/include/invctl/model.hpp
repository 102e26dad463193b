#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "invctl/errors.hpp"

namespace invctl {

namespace tolerance {
inline constexpr double value = 1e-9;
inline constexpr double probability = 1e-12;
}  // namespace tolerance

/// Piecewise-linear convex function on the integers with h(0) = 0.
///
/// `slopes[k]` is the slope on the k-th segment; segment 0 extends to -inf
/// and the last segment to +inf, so there is one more slope than breakpoints.
template <typename Scalar = double>
class PLConvex {
 public:
  PLConvex(std::vector<int> breakpoints, std::vector<Scalar> slopes)
      : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
    if (breakpoints_.empty())
      throw SpecError("cost function needs at least one breakpoint");
    if (slopes_.size() != breakpoints_.size() + 1)
      throw SpecError("cost function needs exactly one more slope than breakpoints");
    for (std::size_t k = 1; k < breakpoints_.size(); ++k)
      if (breakpoints_[k] <= breakpoints_[k - 1])
        throw SpecError("breakpoints must be strictly increasing");
    for (std::size_t k = 1; k < slopes_.size(); ++k)
      if (slopes_[k] < slopes_[k - 1])
        throw SpecError("slopes must be non-decreasing (convexity)");
    if (!(slopes_.front() < 0) || !(slopes_.back() > 0))
      throw SpecError("leftmost slope must be negative and rightmost slope positive");
    // h(0) = 0 is the anchor; h >= 0 then requires 0 to be a minimizer.
    if (slope_left_of(0) > 0 || slope_right_of(0) < 0)
      throw SpecError("cost function must attain its minimum 0 at x = 0");

    knot_values_.reserve(breakpoints_.size());
    for (int b : breakpoints_) knot_values_.push_back(integral_from_zero(b));
  }

  Scalar operator()(int x) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    if (it == breakpoints_.begin())
      return knot_values_.front() + slopes_.front() * Scalar(x - breakpoints_.front());
    const auto k = static_cast<std::size_t>(it - breakpoints_.begin());
    return knot_values_[k - 1] + slopes_[k] * Scalar(x - breakpoints_[k - 1]);
  }

  const std::vector<int>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<Scalar>& slopes() const noexcept { return slopes_; }
  Scalar leftmost_slope() const noexcept { return slopes_.front(); }
  Scalar rightmost_slope() const noexcept { return slopes_.back(); }

 private:
  // Slope of the segment immediately left / right of integer x.
  Scalar slope_left_of(int x) const {
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return slopes_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }
  Scalar slope_right_of(int x) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return slopes_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }

  Scalar integral_from_zero(int x) const {
    const double a = std::min(0, x), b = std::max(0, x);
    Scalar acc(0);
    for (std::size_t k = 0; k < slopes_.size(); ++k) {
      const double seg_lo = k == 0 ? -INFINITY : breakpoints_[k - 1];
      const double seg_hi = k == breakpoints_.size() ? INFINITY : breakpoints_[k];
      const double len = std::min(b, seg_hi) - std::max(a, seg_lo);
      if (len > 0) acc += slopes_[k] * Scalar(len);
    }
    return x >= 0 ? acc : -acc;
  }

  std::vector<int> breakpoints_;
  std::vector<Scalar> slopes_;
  std::vector<Scalar> knot_values_;
};

template <typename Scalar>
Scalar eval_cost(const PLConvex<Scalar>& h, int x) {
  return h(x);
}

/// Chord slope (h(y) - h(z)) / (y - z).
template <typename Scalar>
Scalar slope_H(const PLConvex<Scalar>& h, int y, int z) {
  if (y == z) throw std::domain_error("slope_H: y and z must differ");
  return (h(y) - h(z)) / Scalar(y - z);
}

/// Asymptotic backorder rate: -lim h(x)/x as x -> -inf.
template <typename Scalar>
Scalar k_h(const PLConvex<Scalar>& h) {
  return -h.leftmost_slope();
}

/// Finite-support pmf on the non-negative integers, stored sparsely and
/// sorted by value.
template <typename Scalar = double>
class Pmf {
 public:
  using Atom = std::pair<int, Scalar>;

  Pmf() : atoms_{{0, Scalar(1)}} {}

  explicit Pmf(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.first < b.first; });
    if (atoms_.empty()) throw SpecError("pmf needs at least one atom");
    Scalar total(0);
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      const auto& [value, prob] = atoms_[k];
      if (value < 0) throw SpecError("pmf support must be non-negative");
      if (!(prob > 0) || prob > Scalar(1) + Scalar(tolerance::probability))
        throw SpecError("pmf probabilities must lie in (0, 1]");
      if (k > 0 && atoms_[k - 1].first == value)
        throw SpecError("pmf support values must be distinct");
      total += prob;
    }
    using std::abs;
    if (abs(total - Scalar(1)) > Scalar(tolerance::probability))
      throw SpecError("pmf probabilities must sum to 1");
  }

  static Pmf point_mass(int value) { return Pmf({{value, Scalar(1)}}); }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  int min_value() const { return atoms_.front().first; }
  int max_value() const { return atoms_.back().first; }

  Scalar probability(int value) const {
    for (const auto& [v, p] : atoms_)
      if (v == value) return p;
    return Scalar(0);
  }

  template <typename F>
  auto expect(F&& f) const {
    decltype(f(0) * Scalar(1)) acc(0);
    for (const auto& [v, p] : atoms_) acc += p * f(v);
    return acc;
  }

  Scalar mean() const {
    return expect([](int v) { return Scalar(v); });
  }

 private:
  std::vector<Atom> atoms_;
};

template <typename Scalar>
Pmf<Scalar> convolve(const Pmf<Scalar>& a, const Pmf<Scalar>& b) {
  std::map<int, Scalar> acc;
  for (const auto& [va, pa] : a.atoms())
    for (const auto& [vb, pb] : b.atoms()) acc[va + vb] += pa * pb;
  std::vector<typename Pmf<Scalar>::Atom> atoms;
  atoms.reserve(acc.size());
  for (const auto& [v, p] : acc)
    if (p > 0) atoms.emplace_back(v, p);
  return Pmf<Scalar>(std::move(atoms));
}

/// Distribution of the sum of t i.i.d. copies of `demand`; t = 0 gives {0: 1}.
template <typename Scalar>
Pmf<Scalar> convolve_demand(const Pmf<Scalar>& demand, int t) {
  if (t < 0) throw std::domain_error("convolve_demand: t must be non-negative");
  Pmf<Scalar> acc;
  for (int k = 0; k < t; ++k) acc = convolve(acc, demand);
  return acc;
}

/// One problem instance. Infinite-horizon routines additionally require
/// alpha < 1 and check it themselves.
template <typename Scalar = double>
struct Problem {
  Scalar K;
  Scalar c_bar;
  PLConvex<Scalar> h;
  Pmf<Scalar> demand;
  Scalar alpha;

  Problem(Scalar fixed_cost, Scalar unit_cost, PLConvex<Scalar> holding, Pmf<Scalar> d,
          Scalar discount)
      : K(fixed_cost), c_bar(unit_cost), h(std::move(holding)), demand(std::move(d)),
        alpha(discount) {
    if (!(K > 0)) throw SpecError("fixed ordering cost K must be positive");
    if (!(c_bar > 0)) throw SpecError("unit ordering cost must be positive");
    if (!(alpha >= 0)) throw SpecError("discount factor must be non-negative");
    if (!(demand.max_value() > 0)) throw SpecError("demand must be positive with positive probability");
  }

  Problem with_alpha(Scalar a) const {
    return Problem(K, c_bar, h, demand, a);
  }

  // E[h(y - D)].
  Scalar expected_holding(int y) const {
    return demand.expect([&](int d) { return h(y - d); });
  }
};

/// c(x, a) = K 1{a > 0} + c_bar a + E[h(x + a - D)].
template <typename Scalar>
Scalar one_step_cost(const Problem<Scalar>& p, int x, int a) {
  if (a < 0) throw std::domain_error("one_step_cost: order quantity must be non-negative");
  return (a > 0 ? p.K : Scalar(0)) + p.c_bar * Scalar(a) + p.expected_holding(x + a);
}

}  // namespace invctl
