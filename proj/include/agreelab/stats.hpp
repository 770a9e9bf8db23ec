#pragma once

#include <cstdint>
#include <vector>

namespace agl {

/// Frequency estimate with a confidence half-width. Exact computations use
/// ci_halfwidth = 0.
struct McEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t samples = 0;
  bool exact = false;
};

/// Wilson 95% interval half-width for x successes out of n trials.
double wilson_halfwidth(std::uint64_t successes, std::uint64_t trials);

/// Wilson 95% score interval (lower, upper).
struct Interval {
  double lo;
  double hi;
};
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Ordinary least squares y = a + b x with standard errors; enough points
/// assumed (size >= 3).
struct LinearFit {
  double intercept;
  double slope;
  double intercept_se;
  double slope_se;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson chi-square statistic for observed counts vs equal expected cells.
double chi_square_uniform(const std::vector<std::uint64_t>& observed);

/// Approximate upper quantile of the chi-square distribution
/// (Wilson–Hilferty); q is the upper tail mass, e.g. 0.01 for the 99% bound.
double chi_square_upper(double q, unsigned dof);

}  // namespace agl
