#include "spreg/family.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "spreg/errors.hpp"

namespace spreg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// glibc's lgamma() writes the global signgam; lgamma_r keeps this reentrant.
double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }

bool is_count(double y) { return y >= 0.0 && std::isfinite(y) && std::floor(y) == y; }

void check_count(double y) {
  if (!is_count(y)) throw DomainError("count families need a nonnegative integer observation, got " + std::to_string(y));
}

// --- negative binomial kernel, both variance forms -------------------------

struct NbShape {
  double size;  // r
  double prob;  // success probability r / (r + mu)
};

NbShape nb_shape(NbVariance v, double mu, double theta) {
  if (v == NbVariance::quadratic) return {theta, theta / (theta + mu)};
  return {mu / theta, 1.0 / (1.0 + theta)};
}

double nb_logpmf(NbVariance v, double y, double mu, double theta) {
  if (v == NbVariance::quadratic) {
    double lp = log_gamma(y + theta) - log_gamma(theta) - log_gamma(y + 1.0) - theta * std::log1p(mu / theta);
    if (y > 0.0) lp -= y * std::log1p(theta / mu);
    return lp;
  }
  const double r = mu / theta;
  double lp = log_gamma(y + r) - log_gamma(r) - log_gamma(y + 1.0) - r * std::log1p(theta);
  if (y > 0.0) lp += y * (std::log(theta) - std::log1p(theta));
  return lp;
}

double nb_log_p0(NbVariance v, double mu, double theta) {
  if (v == NbVariance::quadratic) return -theta * std::log1p(mu / theta);
  return -(mu / theta) * std::log1p(theta);
}

double nb_cdf(NbVariance v, double y, double mu, double theta) {
  if (y < 0.0) return 0.0;
  const NbShape s = nb_shape(v, mu, theta);
  return boost::math::ibeta(s.size, std::floor(y) + 1.0, s.prob);
}

// Derivatives of the untruncated NB log pmf w.r.t. mu (k = 0) or theta (k = 1).
ParamDerivs nb_derivs(NbVariance v, double y, double mu, double theta, std::size_t k) {
  ParamDerivs out{nb_logpmf(v, y, mu, theta), 0.0, 0.0, kNaN};
  if (v == NbVariance::quadratic) {
    const double s = theta + mu;
    if (k == 0) {
      out.d1 = y / mu - (y + theta) / s;
      out.d2 = -y / (mu * mu) + (y + theta) / (s * s);
      out.expected_info = theta / (mu * s);
    } else {
      out.d1 = digamma(y + theta) - digamma(theta) - std::log1p(mu / theta) + (mu - y) / s;
      out.d2 = trigamma(y + theta) - trigamma(theta) + 1.0 / theta - 2.0 / s + (y + theta) / (s * s);
    }
    return out;
  }
  const double sg = theta;
  const double r = mu / sg;
  const double l1 = std::log1p(sg);
  const double dg = digamma(y + r) - digamma(r);
  const double tg = trigamma(y + r) - trigamma(r);
  const double a = dg - l1;
  if (k == 0) {
    out.d1 = a / sg;
    out.d2 = tg / (sg * sg);
  } else {
    const double ops = 1.0 + sg;
    out.d1 = -(r / sg) * a - r / ops + y / (sg * ops);
    out.d2 = (2.0 * r / (sg * sg)) * a + (r * r / (sg * sg)) * tg + r / (sg * ops) +
             r * (1.0 + 2.0 * sg) / (sg * ops * ops) - y * (1.0 + 2.0 * sg) / (sg * sg * ops * ops);
  }
  return out;
}

// log P(y = 0) of the NB and its first two derivatives w.r.t. mu or theta.
struct LogP0 {
  double value, d1, d2;
};

LogP0 nb_log_p0_derivs(NbVariance v, double mu, double theta, std::size_t k) {
  LogP0 out{nb_log_p0(v, mu, theta), 0.0, 0.0};
  if (v == NbVariance::quadratic) {
    const double s = theta + mu;
    if (k == 0) {
      out.d1 = -theta / s;
      out.d2 = theta / (s * s);
    } else {
      out.d1 = -std::log1p(mu / theta) + mu / s;
      out.d2 = mu * mu / (theta * s * s);
    }
    return out;
  }
  const double sg = theta;
  const double l1 = std::log1p(sg);
  if (k == 0) {
    out.d1 = -l1 / sg;
    out.d2 = 0.0;
  } else {
    const double ops = 1.0 + sg;
    out.d1 = mu * l1 / (sg * sg) - mu / (sg * ops);
    out.d2 = -2.0 * mu * l1 / (sg * sg * sg) + mu / (sg * sg * ops) + mu * (1.0 + 2.0 * sg) / (sg * sg * ops * ops);
  }
  return out;
}

// log(1 - exp(x)) for x < 0.
double log1mexp(double x) {
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

template <class Cdf>
double count_quantile(double p, Cdf&& cdf_at) {
  if (cdf_at(0.0) >= p) return 0.0;
  double lo = 0.0;  // cdf(lo) < p
  double hi = 1.0;
  while (cdf_at(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw NumericalError("count quantile search did not bracket p");
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (cdf_at(mid) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0, 1), got " + std::to_string(p));
}

// --- generalized Pareto ----------------------------------------------------

double gpd_logpdf(double y, double sigma, double gamma) {
  return -std::log(sigma) - (1.0 / gamma + 1.0) * std::log1p(gamma * y / sigma);
}

ParamDerivs gpd_derivs(double y, double sigma, double gamma, std::size_t k) {
  ParamDerivs out{gpd_logpdf(y, sigma, gamma), 0.0, 0.0, kNaN};
  const double t = sigma + gamma * y;
  if (k == 0) {
    out.d1 = -1.0 / sigma + (1.0 + gamma) * y / (sigma * t);
    out.d2 = 1.0 / (sigma * sigma) - (1.0 + gamma) * y * (t + sigma) / (sigma * sigma * t * t);
  } else {
    const double l = std::log1p(gamma * y / sigma);
    const double g2 = gamma * gamma;
    out.d1 = l / g2 - (1.0 + gamma) * y / (gamma * t);
    out.d2 = -2.0 * l / (g2 * gamma) + y / (g2 * t) -
             y * (gamma * t - (1.0 + gamma) * (t + gamma * y)) / (g2 * t * t);
  }
  return out;
}

Support support_of(FamilyKind kind, std::size_t k) {
  if (kind == FamilyKind::normal_ls && k == 0) return Support::real;
  if (kind == FamilyKind::za_negbin && k == 2) return Support::unit_interval;
  return Support::positive;
}

bool response_matches(Support s, const ResponseFunction& h) {
  switch (s) {
    case Support::real: return h.kind() == ResponseKind::identity;
    case Support::positive: return h.positive();
    case Support::unit_interval: return h.kind() == ResponseKind::logistic;
  }
  return false;
}

}  // namespace

// --- FamilySpec -------------------------------------------------------------

FamilySpec::FamilySpec(FamilyKind kind, NbVariance variance, std::vector<ParameterSpec> params)
    : kind_(kind), variance_(variance), params_(std::move(params)) {}

FamilySpec FamilySpec::make(FamilyKind kind, std::vector<ResponseFunction> responses, NbVariance variance) {
  const std::vector<std::string> names = parameter_names(kind);
  if (responses.size() != names.size()) {
    throw ConfigError(to_string(kind) + " has " + std::to_string(names.size()) + " parameters, got " +
                      std::to_string(responses.size()) + " response functions");
  }
  std::vector<ParameterSpec> params;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const Support s = support_of(kind, k);
    if (!response_matches(s, responses[k])) {
      throw ConfigError("response '" + responses[k].name() + "' does not map onto the support of " +
                        to_string(kind) + " parameter '" + names[k] + "'");
    }
    params.push_back({names[k], s, responses[k]});
  }
  return FamilySpec(kind, variance, std::move(params));
}

FamilySpec FamilySpec::poisson(ResponseFunction lambda) { return make(FamilyKind::poisson, {lambda}); }

FamilySpec FamilySpec::negbin(ResponseFunction mu, ResponseFunction theta, NbVariance variance) {
  return make(FamilyKind::negbin, {mu, theta}, variance);
}

FamilySpec FamilySpec::za_negbin(ResponseFunction mu, ResponseFunction theta, ResponseFunction pi,
                                 NbVariance variance) {
  return make(FamilyKind::za_negbin, {mu, theta, pi}, variance);
}

FamilySpec FamilySpec::normal_ls(ResponseFunction mu, ResponseFunction sigma) {
  return make(FamilyKind::normal_ls, {mu, sigma});
}

FamilySpec FamilySpec::gpd(ResponseFunction sigma, ResponseFunction gamma) {
  return make(FamilyKind::gpd, {sigma, gamma});
}

std::size_t FamilySpec::index_of(std::string_view parameter) const {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (params_[k].name == parameter) return k;
  }
  throw ConfigError("family " + to_string(kind_) + " has no parameter '" + std::string(parameter) + "'");
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::poisson: return "poisson";
    case FamilyKind::negbin: return "negbin";
    case FamilyKind::za_negbin: return "za_negbin";
    case FamilyKind::normal_ls: return "normal_ls";
    case FamilyKind::gpd: return "gpd";
  }
  return "?";
}

FamilyKind parse_family(std::string_view name) {
  for (FamilyKind k : {FamilyKind::poisson, FamilyKind::negbin, FamilyKind::za_negbin, FamilyKind::normal_ls,
                       FamilyKind::gpd}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

std::string to_string(NbVariance v) { return v == NbVariance::quadratic ? "quadratic" : "linear"; }

NbVariance parse_nb_variance(std::string_view name) {
  if (name == "quadratic" || name == "nb2") return NbVariance::quadratic;
  if (name == "linear" || name == "nb1") return NbVariance::linear;
  throw ConfigError("unknown negative binomial variance form '" + std::string(name) + "'");
}

std::vector<std::string> parameter_names(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::poisson: return {"lambda"};
    case FamilyKind::negbin: return {"mu", "theta"};
    case FamilyKind::za_negbin: return {"mu", "theta", "pi"};
    case FamilyKind::normal_ls: return {"mu", "sigma"};
    case FamilyKind::gpd: return {"sigma", "gamma"};
  }
  return {};
}

void check_parameters(const FamilySpec& f, std::span<const double> theta) {
  if (theta.size() != f.size()) throw DomainError("wrong number of distribution parameters");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double v = theta[k];
    bool ok = std::isfinite(v);
    switch (f.parameters()[k].support) {
      case Support::real: break;
      case Support::positive: ok = ok && v > 0.0; break;
      case Support::unit_interval: ok = ok && v > 0.0 && v < 1.0; break;
    }
    if (!ok) {
      throw DomainError(to_string(f.kind()) + " parameter '" + f.parameters()[k].name + "' outside its support: " +
                        std::to_string(v));
    }
  }
}

// --- single-observation distribution functions -----------------------------

double log_density(const FamilySpec& f, double y, std::span<const double> theta) {
  check_parameters(f, theta);
  switch (f.kind()) {
    case FamilyKind::poisson:
    case FamilyKind::negbin:
    case FamilyKind::za_negbin: check_count(y); break;
    case FamilyKind::normal_ls:
      if (!std::isfinite(y)) throw DomainError("normal_ls observation must be finite");
      break;
    case FamilyKind::gpd:
      if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("gpd exceedance must be >= 0, got " + std::to_string(y));
      break;
  }
  return log_density_unchecked(f, y, theta);
}

double log_density_unchecked(const FamilySpec& f, double y, std::span<const double> theta) {
  switch (f.kind()) {
    case FamilyKind::poisson: {
      const double lambda = theta[0];
      return (y > 0.0 ? y * std::log(lambda) : 0.0) - lambda - log_gamma(y + 1.0);
    }
    case FamilyKind::negbin: return nb_logpmf(f.nb_variance(), y, theta[0], theta[1]);
    case FamilyKind::za_negbin: {
      if (y == 0.0) return std::log(theta[2]);
      const double l0 = nb_log_p0(f.nb_variance(), theta[0], theta[1]);
      return std::log1p(-theta[2]) + nb_logpmf(f.nb_variance(), y, theta[0], theta[1]) - log1mexp(l0);
    }
    case FamilyKind::normal_ls: {
      const double z = (y - theta[0]) / theta[1];
      return -std::log(theta[1]) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
    }
    case FamilyKind::gpd: return gpd_logpdf(y, theta[0], theta[1]);
  }
  return kNaN;
}

double cdf(const FamilySpec& f, double y, std::span<const double> theta) {
  check_parameters(f, theta);
  if (std::isnan(y)) throw DomainError("cdf: NaN observation");
  switch (f.kind()) {
    case FamilyKind::poisson:
      if (y < 0.0) return 0.0;
      return boost::math::gamma_q(std::floor(y) + 1.0, theta[0]);
    case FamilyKind::negbin: return nb_cdf(f.nb_variance(), y, theta[0], theta[1]);
    case FamilyKind::za_negbin: {
      if (y < 0.0) return 0.0;
      const double pi = theta[2];
      if (y < 1.0) return pi;
      const double p0 = std::exp(nb_log_p0(f.nb_variance(), theta[0], theta[1]));
      const double fy = nb_cdf(f.nb_variance(), y, theta[0], theta[1]);
      return pi + (1.0 - pi) * (fy - p0) / (1.0 - p0);
    }
    case FamilyKind::normal_ls: return std_normal_cdf((y - theta[0]) / theta[1]);
    case FamilyKind::gpd:
      if (y <= 0.0) return 0.0;
      return -std::expm1(-std::log1p(theta[1] * y / theta[0]) / theta[1]);
  }
  return kNaN;
}

double quantile(const FamilySpec& f, double p, std::span<const double> theta) {
  check_probability(p);
  check_parameters(f, theta);
  switch (f.kind()) {
    case FamilyKind::normal_ls: return theta[0] + theta[1] * std_normal_quantile(p);
    case FamilyKind::gpd: return theta[0] / theta[1] * std::expm1(-theta[1] * std::log1p(-p));
    default: return count_quantile(p, [&](double y) { return cdf(f, y, theta); });
  }
}

double mean(const FamilySpec& f, std::span<const double> theta) {
  check_parameters(f, theta);
  switch (f.kind()) {
    case FamilyKind::poisson:
    case FamilyKind::negbin:
    case FamilyKind::normal_ls: return theta[0];
    case FamilyKind::za_negbin: {
      const double l0 = nb_log_p0(f.nb_variance(), theta[0], theta[1]);
      return (1.0 - theta[2]) * theta[0] / -std::expm1(l0);
    }
    case FamilyKind::gpd: return theta[1] < 1.0 ? theta[0] / (1.0 - theta[1]) : kInf;
  }
  return kNaN;
}

double sample(const FamilySpec& f, std::span<const double> theta, Rng& rng) {
  check_parameters(f, theta);
  auto nb_draw = [&](double mu, double th) {
    const NbShape s = nb_shape(f.nb_variance(), mu, th);
    std::gamma_distribution<double> g(s.size, (1.0 - s.prob) / s.prob);
    const double rate = g(rng);
    if (!(rate > 0.0)) return 0.0;
    return static_cast<double>(std::poisson_distribution<long long>(rate)(rng));
  };
  switch (f.kind()) {
    case FamilyKind::poisson: return static_cast<double>(std::poisson_distribution<long long>(theta[0])(rng));
    case FamilyKind::negbin: return nb_draw(theta[0], theta[1]);
    case FamilyKind::za_negbin: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      if (unif(rng) < theta[2]) return 0.0;
      // Zero-truncated part by inversion on (P(0), 1).
      const double p0 = std::exp(nb_log_p0(f.nb_variance(), theta[0], theta[1]));
      double u = p0 + (1.0 - p0) * unif(rng);
      u = std::min(std::max(u, std::nextafter(p0, 1.0)), std::nextafter(1.0, 0.0));
      const FamilySpec untruncated = FamilySpec::negbin(ResponseFunction::exponential(),
                                                        ResponseFunction::exponential(), f.nb_variance());
      const double nb_theta[2] = {theta[0], theta[1]};
      return std::max(1.0, quantile(untruncated, u, nb_theta));
    }
    case FamilyKind::normal_ls: return std::normal_distribution<double>(theta[0], theta[1])(rng);
    case FamilyKind::gpd: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double u = unif(rng);
      while (u == 0.0) u = unif(rng);
      return theta[0] / theta[1] * std::expm1(-theta[1] * std::log(u));
    }
  }
  return kNaN;
}

ParamDerivs param_derivs(const FamilySpec& f, double y, std::span<const double> theta, std::size_t k) {
  switch (f.kind()) {
    case FamilyKind::poisson: {
      const double lambda = theta[0];
      return {(y > 0.0 ? y * std::log(lambda) : 0.0) - lambda - log_gamma(y + 1.0), y / lambda - 1.0,
              -y / (lambda * lambda), 1.0 / lambda};
    }
    case FamilyKind::negbin: return nb_derivs(f.nb_variance(), y, theta[0], theta[1], k);
    case FamilyKind::za_negbin: {
      // log_density is taken from log_density_unchecked so both paths agree bit for bit.
      const double ld = log_density_unchecked(f, y, theta);
      const double pi = theta[2];
      if (k == 2) {
        const double info = 1.0 / (pi * (1.0 - pi));
        if (y == 0.0) return {ld, 1.0 / pi, -1.0 / (pi * pi), info};
        const double q = 1.0 - pi;
        return {ld, -1.0 / q, -1.0 / (q * q), info};
      }
      if (y == 0.0) return {ld, 0.0, 0.0, kNaN};
      ParamDerivs out = nb_derivs(f.nb_variance(), y, theta[0], theta[1], k);
      const LogP0 l0 = nb_log_p0_derivs(f.nb_variance(), theta[0], theta[1], k);
      const double p0 = std::exp(l0.value);
      const double one_minus = -std::expm1(l0.value);
      const double odds = p0 / one_minus;
      out.log_density = ld;
      out.d1 += odds * l0.d1;
      out.d2 += p0 / (one_minus * one_minus) * l0.d1 * l0.d1 + odds * l0.d2;
      out.expected_info = kNaN;
      return out;
    }
    case FamilyKind::normal_ls: {
      const double mu = theta[0];
      const double sigma = theta[1];
      const double r = y - mu;
      const double s2 = sigma * sigma;
      const double ld = log_density_unchecked(f, y, theta);
      if (k == 0) return {ld, r / s2, -1.0 / s2, 1.0 / s2};
      return {ld, -1.0 / sigma + r * r / (s2 * sigma), 1.0 / s2 - 3.0 * r * r / (s2 * s2), 2.0 / s2};
    }
    case FamilyKind::gpd: return gpd_derivs(y, theta[0], theta[1], k);
  }
  return {kNaN, kNaN, kNaN, kNaN};
}

bool prefers_expected_info(const FamilySpec& f, std::size_t k) {
  switch (f.kind()) {
    case FamilyKind::poisson:
    case FamilyKind::normal_ls: return true;
    case FamilyKind::za_negbin: return k == 2;
    default: return false;
  }
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
  check_probability(p);
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace spreg
