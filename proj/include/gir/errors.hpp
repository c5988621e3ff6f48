#pragma once

#include <stdexcept>
#include <string>

namespace gir {

enum class ErrorCode {
  invalid_spec,
  invalid_config,
  parse_error,
  usage,
  insufficient_data,
  invalid_horizon,
  invalid_bandwidth,
  invalid_covariance,
  invalid_restriction,
  index_contract,
  collinearity,
  singular_moment,
  weak_instrument,
  numeric_overflow,
  stationarity_required,
  unstable_bootstrap,
  empty_inversion,
};

const char* error_code_name(ErrorCode c);

/// Library-wide error carrying a machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace gir
