#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbeval {

enum class ErrorCode {
  singular,
  no_candidates,
  unexpanded_compound,
  singular_elimination,
  negative_dimension,
  infeasible,
  no_convergence,
  divergent_argument,
  lower_pole,
  outside_roc,
  domain,
  none_nonsingular,
  divergent_series,
  resonant,
  no_cover,
  slow_convergence,
  jet_order_overflow,
  degenerate_parameters,
  no_closed_form,
  pole,
  pole_proximity,
  method_unavailable,
  parse,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::singular: return "singular";
    case ErrorCode::no_candidates: return "no-candidates";
    case ErrorCode::unexpanded_compound: return "unexpanded-compound";
    case ErrorCode::singular_elimination: return "singular-elimination";
    case ErrorCode::negative_dimension: return "negative-dimension";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::divergent_argument: return "divergent-argument";
    case ErrorCode::lower_pole: return "lower-pole";
    case ErrorCode::outside_roc: return "outside-roc";
    case ErrorCode::domain: return "domain";
    case ErrorCode::none_nonsingular: return "none-nonsingular";
    case ErrorCode::divergent_series: return "divergent-series";
    case ErrorCode::resonant: return "resonant";
    case ErrorCode::no_cover: return "no-cover";
    case ErrorCode::slow_convergence: return "slow-convergence";
    case ErrorCode::jet_order_overflow: return "jet-order-overflow";
    case ErrorCode::degenerate_parameters: return "degenerate-parameters";
    case ErrorCode::no_closed_form: return "no-closed-form";
    case ErrorCode::pole: return "pole";
    case ErrorCode::pole_proximity: return "pole-proximity";
    case ErrorCode::method_unavailable: return "method-unavailable";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mbeval
