#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "invctl/model.hpp"
#include "invctl/tabulated.hpp"

namespace invctl {

/// Planning horizon: a number of steps, or infinite.
class Horizon {
 public:
  static Horizon finite(int steps) {
    if (steps < 0) throw std::domain_error("horizon must be non-negative");
    return Horizon(steps);
  }
  static Horizon infinite() { return Horizon(std::nullopt); }

  bool is_infinite() const noexcept { return !steps_; }
  int steps() const {
    if (!steps_) throw std::logic_error("infinite horizon has no step count");
    return *steps_;
  }
  friend bool operator==(const Horizon&, const Horizon&) = default;

 private:
  explicit Horizon(std::optional<int> steps) : steps_(steps) {}
  std::optional<int> steps_;
};

enum class Structure {
  ss_all_steps,   // (s_t, S_t) at every step
  never_order,    // never ordering is optimal
  hybrid,         // (s_t, S_t) early, never order in the last N_alpha steps
  ss_stationary,  // infinite horizon (s, S)
};

inline const char* to_string(Structure s) {
  switch (s) {
    case Structure::ss_all_steps: return "SS_ALL_STEPS";
    case Structure::never_order: return "NEVER_ORDER";
    case Structure::hybrid: return "HYBRID";
    case Structure::ss_stationary: return "SS_STATIONARY";
  }
  return "?";
}

template <typename Scalar = double>
struct StructureReport {
  Scalar alpha{};
  Scalar alpha_star{};
  std::optional<int> n_alpha;  // nullopt encodes +inf
  bool condition1 = false;
  Horizon horizon = Horizon::infinite();
  Structure structure = Structure::never_order;  // for `horizon`
  int order_steps_end = 0;                        // hybrid: steps [0, end) order
  std::optional<Structure> infinite_structure;    // nullopt when alpha >= 1
};

/// 1 - k_h / c_bar. Always < 1.
template <typename Scalar>
Scalar alpha_star(const Problem<Scalar>& p) {
  return Scalar(1) - k_h(p.h) / p.c_bar;
}

/// Whether some chord of h has slope below -c_bar. For piecewise-linear
/// convex h the steepest descending chords approach the leftmost slope, so
/// this is decided from the slopes and cross-checked against k_h > c_bar.
template <typename Scalar>
bool check_condition1(const Problem<Scalar>& p) {
  bool by_slopes = false;
  for (Scalar s : p.h.slopes())
    if (s < -p.c_bar) by_slopes = true;
  const bool by_rate = k_h(p.h) > p.c_bar;
  if (by_slopes != by_rate)
    throw std::logic_error("check_condition1: slope and k_h routes disagree");
  return by_slopes;
}

/// Smallest t with f_{t,alpha}(-inf) = +inf, i.e. the first t whose
/// leftmost slope c_bar - k_h (1 + alpha + ... + alpha^t) is negative.
/// nullopt when no such t exists.
template <typename Scalar>
std::optional<int> N_alpha(const Problem<Scalar>& p) {
  if (p.alpha <= alpha_star(p)) return std::nullopt;
  const Scalar ratio = p.c_bar / k_h(p.h);
  Scalar partial(0), weight(1);
  for (int t = 0; t < (1 << 24); ++t) {
    partial += weight;
    if (partial > ratio) return t;
    weight *= p.alpha;
    if (weight == Scalar(0)) break;
  }
  throw std::logic_error("N_alpha: geometric sum did not cross c_bar/k_h in floating point");
}

/// f_{t,alpha}(x) = c_bar x + sum_{i=0..t} alpha^i E[h(x - S_{i+1})]
/// tabulated on `window`.
template <typename Scalar>
Tabulated<Scalar> tabulate_f(const Problem<Scalar>& p, int t, Interval window) {
  if (t < 0) throw std::domain_error("tabulate_f: t must be non-negative");
  auto f = Tabulated<Scalar>::from(window, [&](int x) { return p.c_bar * Scalar(x); });
  Pmf<Scalar> sum = p.demand;
  Scalar weight(1);
  for (int i = 0; i <= t; ++i) {
    if (i > 0) {
      sum = convolve(sum, p.demand);
      weight *= p.alpha;
    }
    for (int x = window.lo; x <= window.hi; ++x)
      f(x) += weight * sum.expect([&](int s) { return p.h(x - s); });
  }
  return f;
}

template <typename Scalar>
Scalar f_t_alpha(const Problem<Scalar>& p, int t, int x) {
  return tabulate_f(p, t, Interval{x, x})(x);
}

/// True when the DP stage with index t (t steps already folded into v_t)
/// is in the ordering regime, i.e. G_t is K-convex with an interior minimum.
template <typename Scalar>
bool stage_orders(const Problem<Scalar>& p, int t) {
  if (alpha_star(p) < 0) return true;
  const auto n = N_alpha(p);
  return n && t >= *n;
}

template <typename Scalar>
StructureReport<Scalar> classify(const Problem<Scalar>& p, Horizon horizon) {
  if (horizon.is_infinite() && !(p.alpha < 1))
    throw std::domain_error("infinite horizon requires alpha in [0, 1)");

  StructureReport<Scalar> r;
  r.alpha = p.alpha;
  r.alpha_star = alpha_star(p);
  r.n_alpha = N_alpha(p);
  r.condition1 = check_condition1(p);
  r.horizon = horizon;

  if (p.alpha < 1)
    r.infinite_structure = p.alpha > r.alpha_star ? Structure::ss_stationary : Structure::never_order;

  if (horizon.is_infinite()) {
    r.structure = *r.infinite_structure;
    return r;
  }

  const int n = horizon.steps();
  if (r.alpha_star < 0) {
    r.structure = Structure::ss_all_steps;
    r.order_steps_end = n;
  } else if (!r.n_alpha || n <= *r.n_alpha) {
    r.structure = Structure::never_order;
  } else {
    r.structure = Structure::hybrid;
    r.order_steps_end = n - *r.n_alpha;
  }
  return r;
}

}  // namespace invctl
