#pragma once

#include <algorithm>
#include <cmath>

namespace caccguard {

// |x - y| <= abs + rel * max(|x|, |y|)
struct Comparison {
  double abs = 1e-6;
  double rel = 1e-9;

  bool close(double x, double y) const {
    return std::abs(x - y) <= abs + rel * std::max(std::abs(x), std::abs(y));
  }
  bool close(double x, double y, double z) const { return close(x, y) && close(y, z) && close(x, z); }
};

// Comparison rules used by the supervisor: one for realization outputs, one
// for duplicated sensor channels.
struct Tolerance {
  Comparison control;
  Comparison sensor;
};

// Throws ConfigError on negative components or an all-zero rule.
void validate(const Tolerance& tol);

}  // namespace caccguard
