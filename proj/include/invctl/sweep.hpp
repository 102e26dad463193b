#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "invctl/classify.hpp"
#include "invctl/model.hpp"

namespace invctl {

/// One cell of a regime diagram: the classification of `base` with the unit
/// ordering cost rescaled so that k_h / c_bar == ratio, at discount alpha.
struct SweepRow {
  double ratio = 0;
  double alpha = 0;
  double alpha_star = 0;
  std::optional<int> n_alpha;
  int horizon = 0;
  Structure finite = Structure::never_order;
  int order_steps_end = 0;
  Structure infinite = Structure::never_order;
};

inline std::vector<SweepRow> regime_sweep(const Problem<double>& base, const std::vector<double>& ratios,
                                          double alpha_step, double alpha_max, int horizon) {
  std::vector<SweepRow> rows;
  const int steps = static_cast<int>(std::floor(alpha_max / alpha_step + 1e-9));
  for (double ratio : ratios) {
    const Problem<double> scaled(base.K, k_h(base.h) / ratio, base.h, base.demand, 0.0);
    for (int i = 0; i <= steps; ++i) {
      // i / n rather than i * step keeps grid points like 0.5 exact.
      const double alpha = static_cast<double>(i) / std::round(1.0 / alpha_step);
      const auto p = scaled.with_alpha(alpha);
      const auto fin = classify(p, Horizon::finite(horizon));
      SweepRow row;
      row.ratio = ratio;
      row.alpha = alpha;
      row.alpha_star = fin.alpha_star;
      row.n_alpha = fin.n_alpha;
      row.horizon = horizon;
      row.finite = fin.structure;
      row.order_steps_end = fin.order_steps_end;
      row.infinite = fin.infinite_structure.value();
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace invctl
