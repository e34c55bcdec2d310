#include "spreg/response.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "spreg/errors.hpp"

namespace spreg {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ResponseFunction ResponseFunction::parse(std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "identity") return identity();
  if (t == "exp" || t == "exponential") return exponential();
  if (t == "logit" || t == "logistic") return logistic();
  if (t == "softplus") return softplus(1.0);
  if (t.starts_with("softplus(") && t.ends_with(")")) {
    const std::string_view inner = trim(t.substr(9, t.size() - 10));
    double a = 0.0;
    const auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), a);
    if (ec != std::errc() || ptr != inner.data() + inner.size()) {
      throw ConfigError("cannot parse softplus parameter in '" + std::string(text) + "'");
    }
    try {
      return softplus(a);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid response '") + std::string(text) + "': " + e.what());
    }
  }
  throw ConfigError("unknown response function '" + std::string(text) + "'");
}

double ResponseFunction::value(double eta) const {
  switch (kind_) {
    case ResponseKind::identity: return eta;
    case ResponseKind::exponential: return std::exp(eta);
    case ResponseKind::softplus: return spreg::softplus(*params_, eta);
    case ResponseKind::logistic: return sigmoid(eta);
  }
  return eta;
}

double ResponseFunction::d1(double eta) const {
  switch (kind_) {
    case ResponseKind::identity: return 1.0;
    case ResponseKind::exponential: return std::exp(eta);
    case ResponseKind::softplus: return softplus_d1(*params_, eta);
    case ResponseKind::logistic: {
      const double s = sigmoid(eta);
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

double ResponseFunction::d2(double eta) const {
  switch (kind_) {
    case ResponseKind::identity: return 0.0;
    case ResponseKind::exponential: return std::exp(eta);
    case ResponseKind::softplus: return softplus_d2(*params_, eta);
    case ResponseKind::logistic: {
      const double s = sigmoid(eta);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
  }
  return 0.0;
}

double ResponseFunction::inverse(double theta) const {
  switch (kind_) {
    case ResponseKind::identity:
      if (std::isnan(theta)) throw DomainError("identity inverse: NaN");
      return theta;
    case ResponseKind::exponential:
      if (!(theta > 0.0)) throw DomainError("log link: argument must be > 0");
      return std::log(theta);
    case ResponseKind::softplus: return softplus_inv(*params_, theta);
    case ResponseKind::logistic:
      if (!(theta > 0.0 && theta < 1.0)) throw DomainError("logit link: argument must lie in (0, 1)");
      return std::log(theta) - std::log1p(-theta);
  }
  return theta;
}

std::string ResponseFunction::name() const {
  switch (kind_) {
    case ResponseKind::identity: return "identity";
    case ResponseKind::exponential: return "exp";
    case ResponseKind::logistic: return "logit";
    case ResponseKind::softplus: {
      std::ostringstream os;
      os.precision(17);
      os << "softplus(" << params_->a() << ")";
      return os.str();
    }
  }
  return "identity";
}

}  // namespace spreg
