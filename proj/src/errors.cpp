#include "gir/errors.hpp"

namespace gir {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::usage: return "usage-error";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::invalid_horizon: return "invalid-horizon";
    case ErrorCode::invalid_bandwidth: return "invalid-bandwidth";
    case ErrorCode::invalid_covariance: return "invalid-covariance";
    case ErrorCode::invalid_restriction: return "invalid-restriction";
    case ErrorCode::index_contract: return "index-contract";
    case ErrorCode::collinearity: return "collinearity";
    case ErrorCode::singular_moment: return "singular-moment";
    case ErrorCode::weak_instrument: return "weak-instrument";
    case ErrorCode::numeric_overflow: return "numeric-overflow";
    case ErrorCode::stationarity_required: return "stationarity-required";
    case ErrorCode::unstable_bootstrap: return "unstable-bootstrap";
    case ErrorCode::empty_inversion: return "empty-inversion";
  }
  return "error";
}

}  // namespace gir
