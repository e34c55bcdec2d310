#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "spreg/softplus.hpp"

namespace spreg {

enum class ResponseKind { identity, exponential, softplus, logistic };

/// Maps a linear predictor eta onto a distribution parameter's support.
/// Its inverse is the link function.
class ResponseFunction {
 public:
  static ResponseFunction identity() { return ResponseFunction(ResponseKind::identity); }
  static ResponseFunction exponential() { return ResponseFunction(ResponseKind::exponential); }
  static ResponseFunction logistic() { return ResponseFunction(ResponseKind::logistic); }
  static ResponseFunction softplus(SoftplusParams p) { return ResponseFunction(p); }
  static ResponseFunction softplus(double a) { return ResponseFunction(SoftplusParams(a)); }

  /// Parses "identity", "exp", "logit"/"logistic", "softplus(5)" or "softplus" (a = 1).
  static ResponseFunction parse(std::string_view text);

  ResponseKind kind() const noexcept { return kind_; }
  /// Present iff kind() == softplus.
  std::optional<SoftplusParams> softplus_params() const noexcept { return params_; }

  double value(double eta) const;
  double d1(double eta) const;
  double d2(double eta) const;
  /// Link function. Throws DomainError outside the response's range.
  double inverse(double theta) const;

  /// True if value() maps onto (0, inf).
  bool positive() const noexcept {
    return kind_ == ResponseKind::exponential || kind_ == ResponseKind::softplus;
  }

  /// Canonical text form accepted by parse().
  std::string name() const;

  friend bool operator==(const ResponseFunction&, const ResponseFunction&) = default;

 private:
  explicit ResponseFunction(ResponseKind k) : kind_(k) {}
  explicit ResponseFunction(SoftplusParams p) : kind_(ResponseKind::softplus), params_(p) {}

  ResponseKind kind_;
  std::optional<SoftplusParams> params_;
};

}  // namespace spreg
