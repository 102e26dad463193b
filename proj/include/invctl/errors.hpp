#pragma once

#include <stdexcept>
#include <string>

namespace invctl {

// Invalid problem data: non-convex cost, bad pmf, malformed spec document.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The tabulation window cannot resolve an argmin or a reorder point.
class WindowTooSmallError : public std::runtime_error {
 public:
  enum class Side { lower, upper };
  WindowTooSmallError(Side side, int stage, const std::string& what)
      : std::runtime_error(what), side_(side), stage_(stage) {}
  Side side() const noexcept { return side_; }
  int stage() const noexcept { return stage_; }

 private:
  Side side_;
  int stage_;
};

// A policy was asked for an action at a state it does not cover,
// or does not match the horizon it is evaluated on.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The brute-force oracle refuses instances above its enumeration limits.
class OracleSizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace invctl
