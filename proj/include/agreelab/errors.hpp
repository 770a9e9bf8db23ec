#pragma once

#include <stdexcept>
#include <string>

namespace agl {

/// Invalid argument against a documented precondition.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An exact computation was requested on an instance outside the exactness
/// envelope. The message names the Monte Carlo alternative.
struct exact_infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A structural assumption about the instance was violated mid-computation.
struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries line/offset context in the message.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace agl
