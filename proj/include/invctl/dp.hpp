#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "invctl/classify.hpp"
#include "invctl/errors.hpp"
#include "invctl/model.hpp"
#include "invctl/tabulated.hpp"

namespace invctl {

/// Reorder point s and order-up-to level S, s <= S.
struct Thresholds {
  int s = 0;
  int S = 0;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// One backward-induction stage t: v_t, G_t and the decision rule derived
/// from G_t (the rule that attains v_{t+1}). Entries below the exact range
/// are NaN (values) or -1 (actions).
template <typename Scalar = double>
struct DPStage {
  int v_lo = 0;  // v_t exact on [v_lo, window.hi]
  int G_lo = 0;  // G_t and action exact on [G_lo, window.hi]
  Vector<Scalar> v;
  Vector<Scalar> G;
  std::vector<int> action;
  bool ordering = false;
  std::optional<Thresholds> thresholds;  // set iff ordering
  // The action table equals the threshold rule (or is all zero when not
  // ordering). Can fail for alpha > 1, where G_t need not be K-convex.
  bool rule_exact = true;
};

template <typename Scalar = double>
struct ValueTable {
  Interval window;
  Interval query;
  std::vector<DPStage<Scalar>> stages;  // t = 0..N

  int horizon() const { return static_cast<int>(stages.size()) - 1; }
  Scalar v(int t, int x) const { return stages.at(t).v(x - window.lo); }
  Scalar G(int t, int x) const { return stages.at(t).G(x - window.lo); }
  int action(int t, int x) const { return stages.at(t).action.at(x - window.lo); }

  Tabulated<Scalar> v_table(int t) const { return slice(stages.at(t).v, stages.at(t).v_lo); }
  Tabulated<Scalar> G_table(int t) const { return slice(stages.at(t).G, stages.at(t).G_lo); }

 private:
  Tabulated<Scalar> slice(const Vector<Scalar>& full, int from) const {
    const int offset = from - window.lo;
    return {from, full.tail(full.size() - offset)};
  }
};

/// Tabulation window for an N-step problem answering queries on `query`:
/// extends down by every state reachable through N demands and up by
/// `top_margin` so that order-up-to levels fall strictly inside.
template <typename Scalar>
Interval plan_window(const Problem<Scalar>& p, int N, Interval query, int top_margin = -1) {
  if (query.empty()) throw std::invalid_argument("plan_window: empty query interval");
  if (N < 0) throw std::domain_error("plan_window: N must be non-negative");
  if (N == 0) return query;
  const int d_max = p.demand.max_value();
  if (top_margin < 0) top_margin = 4 * d_max + 8;
  return {query.lo - N * d_max, query.hi + top_margin};
}

/// S = smallest minimizer (within tolerance), s = least x <= S with
/// f(x) <= K + min f. The table is treated as the whole domain; a minimizer
/// pinned to the top edge means the table is too short.
template <typename Scalar>
Thresholds extract_thresholds(const Tabulated<Scalar>& f, Scalar K) {
  const auto& g = f.values;
  if (g.size() == 0) throw std::invalid_argument("extract_thresholds: empty table");
  const Scalar gmin = g.minCoeff();
  const Scalar tol(tolerance::value);
  Eigen::Index S = 0;
  while (g(S) > gmin + tol) ++S;
  if (S == g.size() - 1 && g.size() > 1)
    throw WindowTooSmallError(WindowTooSmallError::Side::upper, -1,
                              "extract_thresholds: minimizer at the top of the table");
  Eigen::Index s = 0;
  while (g(s) > K + gmin + tol) ++s;
  return {f.first + static_cast<int>(s), f.first + static_cast<int>(S)};
}

struct KConvexityWitness {
  int x = 0, m = 0, y = 0;  // x < m < y, lambda = (m - x) / (y - x)
  double excess = 0;        // f(m) minus the K-convex bound
};

struct KConvexityReport {
  bool holds = true;
  std::optional<KConvexityWitness> witness;  // worst violation
};

/// Exhaustive check of f((1-l)x + l y) <= (1-l) f(x) + l f(y) + l K over
/// all integer triples x < m < y of the table.
template <typename Scalar>
KConvexityReport check_k_convex(const Tabulated<Scalar>& f, Scalar K) {
  if (K < 0) throw std::domain_error("check_k_convex: K must be non-negative");
  KConvexityReport report;
  const int lo = f.first, hi = f.last();
  for (int x = lo; x <= hi; ++x) {
    for (int y = x + 2; y <= hi; ++y) {
      const Scalar fx = f(x), fy = f(y);
      for (int m = x + 1; m < y; ++m) {
        const Scalar lambda = Scalar(m - x) / Scalar(y - x);
        const Scalar bound = (1 - lambda) * fx + lambda * fy + lambda * K;
        const double excess = static_cast<double>(f(m) - bound);
        if (excess > tolerance::value &&
            (!report.witness || excess > report.witness->excess)) {
          report.holds = false;
          report.witness = KConvexityWitness{x, m, y, excess};
        }
      }
    }
  }
  return report;
}

/// Exact backward induction v_{t+1}(x) = min_a {K 1{a>0} + G_t(x+a)} - c_bar x,
/// G_t(x) = c_bar x + E[h(x-D)] + alpha E[v_t(x-D)], for t = 0..N on `window`.
/// Orders are capped at the window top. Throws WindowTooSmallError when an
/// ordering stage's minimizer or reorder point is not strictly inside.
template <typename Scalar>
ValueTable<Scalar> backward_induction(const Problem<Scalar>& p, int N, Interval window) {
  if (N < 0) throw std::domain_error("backward_induction: N must be non-negative");
  if (window.empty()) throw std::invalid_argument("backward_induction: empty window");
  const int W = window.size();
  const int d_max = p.demand.max_value();
  const Scalar tol(tolerance::value);
  const Scalar nan = nan_value<Scalar>();
  if (window.lo + N * d_max > window.hi)
    throw WindowTooSmallError(WindowTooSmallError::Side::lower, N,
                              "backward_induction: window shorter than N demand steps");

  ValueTable<Scalar> vt;
  vt.window = window;
  vt.stages.reserve(static_cast<std::size_t>(N) + 1);

  Vector<Scalar> v = Vector<Scalar>::Zero(W);
  int v_lo = window.lo;
  for (int t = 0; t <= N; ++t) {
    DPStage<Scalar> st;
    st.v_lo = v_lo;
    st.v = v;
    st.G_lo = t == 0 ? window.lo : v_lo + d_max;
    st.G = Vector<Scalar>::Constant(W, nan);
    st.action.assign(static_cast<std::size_t>(W), -1);

    for (int x = st.G_lo; x <= window.hi; ++x) {
      Scalar g = p.c_bar * Scalar(x);
      for (const auto& [d, prob] : p.demand.atoms()) {
        const Scalar future = t == 0 ? Scalar(0) : v(x - d - window.lo);
        g += prob * (p.h(x - d) + p.alpha * future);
      }
      st.G(x - window.lo) = g;
    }

    // Suffix minimum of G over (x, hi]; `target` is the smallest state in
    // (x, hi] within tolerance of that minimum.
    Vector<Scalar> next = Vector<Scalar>::Constant(W, nan);
    Scalar suffix_min = std::numeric_limits<Scalar>::infinity();
    int target = -1;
    for (int x = window.hi; x >= st.G_lo; --x) {
      const int i = x - window.lo;
      const Scalar gx = st.G(i);
      Scalar best = gx;
      int a = 0;
      if (x < window.hi) {
        const Scalar g_next = st.G(i + 1);
        suffix_min = std::min(suffix_min, g_next);
        if (g_next <= suffix_min + tol) target = x + 1;
        const Scalar order = p.K + suffix_min;
        best = std::min(gx, order);
        if (order < gx - tol) a = target - x;
      }
      st.action[static_cast<std::size_t>(i)] = a;
      next(i) = best - p.c_bar * Scalar(x);
    }

    st.ordering = stage_orders(p, t);
    if (st.ordering) {
      const Tabulated<Scalar> g_table{st.G_lo, st.G.tail(W - (st.G_lo - window.lo))};
      Thresholds th;
      try {
        th = extract_thresholds(g_table, p.K);
      } catch (const WindowTooSmallError&) {
        throw WindowTooSmallError(WindowTooSmallError::Side::upper, t,
                                  "stage " + std::to_string(t) + ": minimizer at window top");
      }
      if (th.S > window.hi - std::max(1, d_max))
        throw WindowTooSmallError(WindowTooSmallError::Side::upper, t,
                                  "stage " + std::to_string(t) + ": minimizer too close to window top");
      if (!(g_table(st.G_lo) > p.K + g_table.values.minCoeff() + tol))
        throw WindowTooSmallError(WindowTooSmallError::Side::lower, t,
                                  "stage " + std::to_string(t) + ": reorder point not resolved");
      st.thresholds = th;
    }
    for (int x = st.G_lo; x <= window.hi && st.rule_exact; ++x) {
      const int expected = st.thresholds && x < st.thresholds->s ? st.thresholds->S - x : 0;
      st.rule_exact = st.action[static_cast<std::size_t>(x - window.lo)] == expected;
    }

    vt.stages.push_back(std::move(st));
    v = std::move(next);
    v_lo = vt.stages.back().G_lo;
  }
  vt.query = {vt.stages.back().v_lo, window.hi};
  return vt;
}

/// Backward induction with automatic widening: the lower edge and the top
/// margin grow until every ordering stage resolves (s_t, S_t) inside.
template <typename Scalar>
ValueTable<Scalar> solve_finite(const Problem<Scalar>& p, int N, Interval query) {
  if (query.empty()) throw std::invalid_argument("solve_finite: empty query interval");
  const int d_max = p.demand.max_value();
  int extra_low = 0;
  int top_margin = 4 * d_max + 8;
  for (int attempt = 0;; ++attempt) {
    Interval padded{query.lo - extra_low, query.hi};
    // G_N's thresholds are still extracted when N = 0, so widen as for N > 0.
    const Interval window =
        N == 0 ? Interval{padded.lo, padded.hi + top_margin} : plan_window(p, N, padded, top_margin);
    try {
      auto vt = backward_induction(p, N, window);
      vt.query = query;
      return vt;
    } catch (const WindowTooSmallError& e) {
      if (attempt >= 24) throw;
      if (e.side() == WindowTooSmallError::Side::lower)
        extra_low = std::max(2 * extra_low, 8 * d_max);
      else
        top_margin *= 2;
    }
  }
}

struct GfIdentityReport {
  bool holds = true;
  double max_abs_diff = 0;
  int last_stage_checked = -1;
};

/// Compares recursive G_t with the closed form f_{t,alpha} on `query` for
/// every t <= min(N_alpha, N).
template <typename Scalar>
GfIdentityReport verify_Gf_identity(const Problem<Scalar>& p, int N, Interval query) {
  const auto vt = solve_finite(p, N, query);
  const auto n_alpha = N_alpha(p);
  const int last = n_alpha ? std::min(*n_alpha, N) : N;
  GfIdentityReport r;
  for (int t = 0; t <= last; ++t) {
    const auto f = tabulate_f(p, t, query);
    for (int x = query.lo; x <= query.hi; ++x) {
      using std::abs;
      const double diff = static_cast<double>(abs(vt.G(t, x) - f(x)));
      r.max_abs_diff = std::max(r.max_abs_diff, diff);
    }
    r.last_stage_checked = t;
  }
  r.holds = r.max_abs_diff < 1e-8;
  return r;
}

/// Approximation of the infinite-horizon solution on a query window.
template <typename Scalar = double>
struct InfiniteSolution {
  Interval query;
  Structure structure = Structure::never_order;
  Tabulated<Scalar> v;                   // v_alpha on query
  Tabulated<Scalar> G;                   // G_alpha on query
  std::optional<Thresholds> thresholds;  // (s_alpha, S_alpha); nullopt = never order
  Scalar error_bound{};                  // sup |v_alpha - v| on query
  int terms = 0;                         // series terms or DP stages used
  Scalar tail_cost_bound{};              // M3 per-step cost bound (ordering regime)
};

namespace detail {

// sum_{i >= m} alpha^i and sum_{i >= m} (i+1) alpha^i.
template <typename Scalar>
Scalar geometric_tail(Scalar alpha, int m) {
  using std::pow;
  return pow(alpha, m) / (1 - alpha);
}
template <typename Scalar>
Scalar weighted_geometric_tail(Scalar alpha, int m) {
  using std::pow;
  const Scalar q = 1 - alpha;
  return pow(alpha, m) * (Scalar(m + 1) / q + alpha / (q * q));
}

template <typename Scalar>
InfiniteSolution<Scalar> never_order_closed_form(const Problem<Scalar>& p, Interval query,
                                                 Scalar tol) {
  // E[h(x - S_t)] <= c_bar t E[D] + c_bar max(-x, 0) + h(max(x, 0)) bounds every
  // series term once k_h <= c_bar, which holds in this regime.
  const Scalar mean = p.demand.mean();
  Scalar worst_offset(0);
  for (int x = query.lo; x <= query.hi; ++x)
    worst_offset = std::max(worst_offset, p.c_bar * Scalar(std::max(-x, 0)) + p.h(std::max(x, 0)));
  auto tail_after = [&](int T) {
    if (p.alpha == 0) return Scalar(0);
    return p.c_bar * mean * weighted_geometric_tail(p.alpha, T + 1) +
           worst_offset * geometric_tail(p.alpha, T + 1);
  };
  int T = 0;
  while (!(tail_after(T) < tol)) ++T;

  InfiniteSolution<Scalar> sol;
  sol.query = query;
  sol.structure = Structure::never_order;
  sol.v = Tabulated<Scalar>::from(query, [](int) { return Scalar(0); });
  Pmf<Scalar> sum = p.demand;
  Scalar weight(1);
  for (int i = 0; i <= T; ++i) {
    if (i > 0) {
      sum = convolve(sum, p.demand);
      weight *= p.alpha;
    }
    for (int x = query.lo; x <= query.hi; ++x)
      sol.v(x) += weight * sum.expect([&](int s) { return p.h(x - s); });
  }
  sol.G = Tabulated<Scalar>::from(query, [&](int x) { return sol.v(x) + p.c_bar * Scalar(x); });
  sol.error_bound = tail_after(T);
  sol.terms = T + 1;
  return sol;
}

}  // namespace detail

/// Infinite-horizon discounted solution on `query`.
///
/// Never-order regime: v_alpha = sum_i alpha^i E[h(x - S_{i+1})] truncated
/// with an analytic tail bound. Ordering regime: backward induction to a
/// depth N where alpha^N M3 / (1 - alpha) < tol, M3 being the per-step cost
/// bound of the policy that follows the N-step optimum and then (s_a, S_a).
template <typename Scalar>
InfiniteSolution<Scalar> value_iteration(const Problem<Scalar>& p, Interval query, Scalar tol) {
  if (!(p.alpha < 1)) throw std::domain_error("value_iteration: alpha must lie in [0, 1)");
  if (!(tol > 0)) throw std::domain_error("value_iteration: tol must be positive");
  const auto report = classify(p, Horizon::infinite());
  if (report.structure == Structure::never_order)
    return detail::never_order_closed_form(p, query, tol);

  const int n_alpha = report.n_alpha.value();
  const Scalar mean = p.demand.mean();
  const int d_max = p.demand.max_value();
  int N = std::max(n_alpha + 1, 8);
  for (int round = 0;; ++round) {
    const auto vt = solve_finite(p, N, query);
    const Thresholds limit = vt.stages[static_cast<std::size_t>(N)].thresholds.value();
    const Thresholds first = vt.stages[static_cast<std::size_t>(n_alpha)].thresholds.value();
    int m_s = limit.S;
    for (int t = n_alpha; t <= N; ++t)
      m_s = std::max(m_s, vt.stages[static_cast<std::size_t>(t)].thresholds->S);
    m_s += d_max;  // margin over the observed order-up-to levels

    const int z = query.hi + 1;
    const Scalar m1 = p.expected_holding(limit.s) +
                      p.expected_holding(std::max({z, m_s, limit.S}));
    const Scalar m2 =
        p.c_bar * std::max({Scalar(0), Scalar(limit.S - limit.s) + mean,
                            Scalar(limit.S - first.s) + Scalar(n_alpha + 1) * mean});
    const Scalar m3 = p.K + m1 + m2;
    using std::pow;
    const Scalar bound = pow(p.alpha, N) * m3 / (1 - p.alpha);

    if (bound < tol || round >= 8) {
      if (!(bound < tol))
        throw std::runtime_error("value_iteration: tail bound did not reach tolerance");
      InfiniteSolution<Scalar> sol;
      sol.query = query;
      sol.structure = Structure::ss_stationary;
      sol.v = Tabulated<Scalar>::from(query, [&](int x) { return vt.v(N, x); });
      sol.G = Tabulated<Scalar>::from(query, [&](int x) { return vt.G(N, x); });
      sol.thresholds = limit;
      sol.error_bound = bound;
      sol.terms = N;
      sol.tail_cost_bound = m3;
      return sol;
    }
    using std::ceil;
    using std::log;
    const int needed =
        p.alpha == 0 ? N + 1 : static_cast<int>(ceil(log(tol * (1 - p.alpha) / m3) / log(p.alpha)));
    N = std::max(N + 1, needed + 1);
  }
}

}  // namespace invctl
