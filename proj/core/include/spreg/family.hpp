#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spreg/random.hpp"
#include "spreg/response.hpp"

namespace spreg {

enum class FamilyKind { poisson, negbin, za_negbin, normal_ls, gpd };

/// Variance form of the negative binomial.
///   quadratic: Var = mu + mu^2 / theta   (NB2, theta = size)
///   linear:    Var = mu * (1 + theta)    (NB1 / NBII, theta = dispersion)
enum class NbVariance { quadratic, linear };

enum class Support { real, positive, unit_interval };

struct ParameterSpec {
  std::string name;
  Support support;
  ResponseFunction response;
};

/// A response distribution together with the response function assigned to
/// each of its parameters. Parameter order is fixed per family:
///   poisson   {lambda}
///   negbin    {mu, theta}
///   za_negbin {mu, theta, pi}      pi = P(y = 0)
///   normal_ls {mu, sigma}
///   gpd       {sigma, gamma}       gamma > 0
class FamilySpec {
 public:
  static FamilySpec poisson(ResponseFunction lambda);
  static FamilySpec negbin(ResponseFunction mu, ResponseFunction theta = ResponseFunction::exponential(),
                           NbVariance variance = NbVariance::quadratic);
  static FamilySpec za_negbin(ResponseFunction mu, ResponseFunction theta = ResponseFunction::exponential(),
                              ResponseFunction pi = ResponseFunction::logistic(),
                              NbVariance variance = NbVariance::quadratic);
  static FamilySpec normal_ls(ResponseFunction mu, ResponseFunction sigma);
  static FamilySpec gpd(ResponseFunction sigma, ResponseFunction gamma);

  /// Generic constructor; responses in the family's parameter order.
  static FamilySpec make(FamilyKind kind, std::vector<ResponseFunction> responses,
                         NbVariance variance = NbVariance::quadratic);

  FamilyKind kind() const noexcept { return kind_; }
  NbVariance nb_variance() const noexcept { return variance_; }
  const std::vector<ParameterSpec>& parameters() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }
  const ResponseFunction& response(std::size_t k) const { return params_.at(k).response; }
  /// Throws ConfigError for unknown names.
  std::size_t index_of(std::string_view parameter) const;
  bool discrete() const noexcept { return kind_ != FamilyKind::normal_ls && kind_ != FamilyKind::gpd; }

 private:
  FamilySpec(FamilyKind kind, NbVariance variance, std::vector<ParameterSpec> params);

  FamilyKind kind_;
  NbVariance variance_;
  std::vector<ParameterSpec> params_;
};

std::string to_string(FamilyKind kind);
FamilyKind parse_family(std::string_view name);
std::string to_string(NbVariance v);
NbVariance parse_nb_variance(std::string_view name);
/// Parameter names of a family, in order.
std::vector<std::string> parameter_names(FamilyKind kind);

/// Throws DomainError if theta is outside the family's parameter supports.
void check_parameters(const FamilySpec& f, std::span<const double> theta);

// The single-observation functions below take distribution parameters theta
// (not predictors) in the family's parameter order.

double log_density(const FamilySpec& f, double y, std::span<const double> theta);
/// log_density without support checks; may return -inf or NaN for invalid input.
double log_density_unchecked(const FamilySpec& f, double y, std::span<const double> theta);
double cdf(const FamilySpec& f, double y, std::span<const double> theta);
/// Continuous families: exact inverse. Count families: smallest y with cdf(y) >= p.
double quantile(const FamilySpec& f, double p, std::span<const double> theta);
/// E(y). Infinite for a GPD with gamma >= 1.
double mean(const FamilySpec& f, std::span<const double> theta);
double sample(const FamilySpec& f, std::span<const double> theta, Rng& rng);

/// Log density and its first two derivatives with respect to one distribution parameter.
struct ParamDerivs {
  double log_density;
  double d1;
  double d2;              // observed: second derivative of the log density
  double expected_info;   // E[-d2]; NaN when no closed form is used
};

ParamDerivs param_derivs(const FamilySpec& f, double y, std::span<const double> theta, std::size_t k);

/// True if param_derivs() supplies expected information for parameter k and the
/// family prefers it (Poisson, normal, and the logistic zero part of the hurdle).
bool prefers_expected_info(const FamilySpec& f, std::size_t k);

// Standard normal helpers shared with diagnostics.
double std_normal_cdf(double z);
double std_normal_quantile(double p);

}  // namespace spreg
