#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>

namespace invctl {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Closed integer interval [lo, hi].
struct Interval {
  int lo = 0;
  int hi = 0;

  int size() const noexcept { return hi - lo + 1; }
  bool empty() const noexcept { return hi < lo; }
  bool contains(int x) const noexcept { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const noexcept {
    return lo <= other.lo && other.hi <= hi;
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A function sampled on consecutive integers starting at `first`.
template <typename Scalar = double>
struct Tabulated {
  int first = 0;
  Vector<Scalar> values;

  int last() const { return first + static_cast<int>(values.size()) - 1; }
  Interval domain() const { return {first, last()}; }
  Scalar operator()(int x) const { return values(x - first); }
  Scalar& operator()(int x) { return values(x - first); }

  template <typename F>
  static Tabulated from(Interval dom, F&& f) {
    if (dom.empty()) throw std::invalid_argument("Tabulated::from: empty domain");
    Tabulated t{dom.lo, Vector<Scalar>(dom.size())};
    for (int x = dom.lo; x <= dom.hi; ++x) t(x) = f(x);
    return t;
  }
};

// Discrete second difference test; tolerance absorbs rounding.
template <typename Scalar>
bool is_convex(const Tabulated<Scalar>& f, Scalar tol = Scalar(1e-9)) {
  const auto& v = f.values;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i)
    if (v(i - 1) - 2 * v(i) + v(i + 1) < -tol) return false;
  return true;
}

template <typename Scalar>
constexpr Scalar nan_value() {
  return std::numeric_limits<Scalar>::quiet_NaN();
}

}  // namespace invctl
