#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agreelab/errors.hpp"
#include "agreelab/mask.hpp"

namespace agl {

/// Derived ratios reported (not stored) by TestParams::validate.
struct ParamRatios {
  double alpha;    // t/k
  double beta;     // (k-t)/k
  double c_ratio;  // n/k
};

/// Test geometry: ground-set size, local-set size, intersection size,
/// dimension, alphabet.
struct TestParams {
  unsigned n = 0;
  unsigned k = 0;
  unsigned t = 0;
  unsigned d = 1;
  unsigned alphabet_size = 2;

  /// Throws parameter_error on hard violations. The dimension-d agreement
  /// regime additionally wants t >= 2d and k-t >= d; those only produce
  /// warnings, appended to `warnings` when given.
  ParamRatios validate(std::vector<std::string>* warnings = nullptr) const {
    if (n > Mask128::capacity)
      throw parameter_error("n > 128 not supported (bitmask representation cap)");
    if (!(n >= k && k >= t)) throw parameter_error("need n >= k >= t");
    if (d < 1) throw parameter_error("need d >= 1");
    if (alphabet_size < 2) throw parameter_error("need alphabet_size >= 2");
    if (k == 0) throw parameter_error("need k >= 1");
    if (warnings) {
      if (t < 2 * d)
        warnings->push_back("t=" + std::to_string(t) + " < 2d=" + std::to_string(2 * d) +
                            "; the dimension-" + std::to_string(d) + " regime wants t >= 2d");
      if (k - t < d)
        warnings->push_back("k-t=" + std::to_string(k - t) + " < d=" + std::to_string(d) +
                            "; the regime wants k-t >= d");
    }
    return ParamRatios{static_cast<double>(t) / k, static_cast<double>(k - t) / k,
                       static_cast<double>(n) / k};
  }
};

/// Correlated-pair parameters for the biased regime: each element lands in
/// both sets with probability pq and in exactly one with probability p(1-q),
/// so each marginal is mu_p.
struct BiasedPairParams {
  double p = 0.0;
  double q = 1.0;

  void validate() const {
    if (!(p >= 0.0 && p < 1.0)) throw parameter_error("need 0 <= p < 1");
    if (!(q > 0.0 && q <= 1.0)) throw parameter_error("need 0 < q <= 1");
    if (p * (2.0 - q) > 1.0 + 1e-12) throw parameter_error("need p(2-q) <= 1");
  }
};

}  // namespace agl
