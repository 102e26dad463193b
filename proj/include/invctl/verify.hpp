#pragma once

#include <string>
#include <vector>

#include "invctl/model.hpp"
#include "invctl/tabulated.hpp"

namespace invctl {

struct CheckResult {
  enum class Status { pass, fail, skipped };
  std::string name;
  Status status = Status::pass;
  std::string detail;
};

const char* to_string(CheckResult::Status s);

/// Runs the structural self-checks on one instance: oracle agreement (when
/// small enough), policy structure per stage, K-convexity / convexity of
/// G_t, the closed-form identity G_t = f_t for t <= N_alpha, monotonicity
/// in t, optimality of the induced policy and the action at s_t.
std::vector<CheckResult> verify_instance(const Problem<double>& p, int N, Interval query);

}  // namespace invctl
