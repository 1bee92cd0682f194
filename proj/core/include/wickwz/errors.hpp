#pragma once

#include <stdexcept>
#include <string>

namespace wickwz {

/// Error categories used across the library. Every throwing operation
/// documents which of these it can raise.
enum class Errc {
  not_sorted,
  wrong_endpoints,
  too_few_points,
  out_of_range,
  partition_mismatch,
  dimension_mismatch,
  bad_resolution,
  grid_misaligned,
  non_finite_state,
  sigma_unsupported,
  degenerate_init,
  bad_step,
  no_derivatives,
  too_few_samples,
  empty_bins,
  unsupported_test_function,
  support_out_of_range,
  insufficient_data,
  wrong_model,
  config_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::not_sorted: return "NotSorted";
    case Errc::wrong_endpoints: return "WrongEndpoints";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::partition_mismatch: return "PartitionMismatch";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::bad_resolution: return "BadResolution";
    case Errc::grid_misaligned: return "GridMisaligned";
    case Errc::non_finite_state: return "NonFiniteState";
    case Errc::sigma_unsupported: return "SigmaUnsupported";
    case Errc::degenerate_init: return "DegenerateInit";
    case Errc::bad_step: return "BadStep";
    case Errc::no_derivatives: return "NoDerivatives";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::empty_bins: return "EmptyBins";
    case Errc::unsupported_test_function: return "UnsupportedTestFunction";
    case Errc::support_out_of_range: return "SupportOutOfRange";
    case Errc::insufficient_data: return "InsufficientData";
    case Errc::wrong_model: return "WrongModel";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace wickwz
