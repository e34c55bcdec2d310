#include "spreg/likelihood.hpp"

#include <cmath>
#include <limits>

#include "spreg/errors.hpp"

namespace spreg {
namespace {

Eigen::MatrixXd linear_predictors(const BoundModel& bm, const Coefficients& coefs) {
  bm.check_conformable(coefs);
  Eigen::MatrixXd eta(bm.n(), static_cast<Eigen::Index>(bm.blocks()));
  for (std::size_t k = 0; k < bm.blocks(); ++k) eta.col(static_cast<Eigen::Index>(k)) = bm.design(k) * coefs[k].beta;
  return eta;
}

Eigen::MatrixXd responses_of(const BoundModel& bm, const Eigen::MatrixXd& eta) {
  Eigen::MatrixXd theta(eta.rows(), eta.cols());
  for (Eigen::Index k = 0; k < eta.cols(); ++k) {
    const ResponseFunction& h = bm.family().response(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < eta.rows(); ++i) theta(i, k) = h.value(eta(i, k));
  }
  return theta;
}

double prior_sum(const BoundModel& bm, const Coefficients& coefs) {
  double lp = 0.0;
  for (std::size_t k = 0; k < bm.blocks(); ++k) lp += bm.model().priors()[k].log_density(coefs[k].beta);
  return lp;
}

}  // namespace

Eigen::MatrixXd parameter_values(const BoundModel& bm, const Coefficients& coefs) {
  return responses_of(bm, linear_predictors(bm, coefs));
}

double log_likelihood(const BoundModel& bm, const Coefficients& coefs) {
  const Eigen::MatrixXd theta = parameter_values(bm, coefs);
  const FamilySpec& f = bm.family();
  const std::size_t k = f.size();
  double row[4];
  double ll = 0.0;
  for (Eigen::Index i = 0; i < bm.n(); ++i) {
    for (std::size_t j = 0; j < k; ++j) row[j] = theta(i, static_cast<Eigen::Index>(j));
    ll += log_density_unchecked(f, bm.y()[i], std::span<const double>(row, k));
  }
  if (std::isnan(ll)) return -std::numeric_limits<double>::infinity();
  return ll;
}

double log_posterior(const BoundModel& bm, const Coefficients& coefs) {
  return log_likelihood(bm, coefs) + prior_sum(bm, coefs);
}

double regularized_cholesky(const Eigen::MatrixXd& info, int max_doublings, Eigen::LLT<Eigen::MatrixXd>& out) {
  out.compute(info);
  if (out.info() == Eigen::Success && info.allFinite()) return 0.0;
  const double scale = info.diagonal().cwiseAbs().maxCoeff();
  double ridge = 1e-6 * (scale > 0.0 && std::isfinite(scale) ? scale : 1.0);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(info.rows(), info.cols());
  for (int attempt = 0; attempt < max_doublings; ++attempt, ridge *= 2.0) {
    out.compute(info + ridge * id);
    if (out.info() == Eigen::Success) return ridge;
  }
  return -1.0;
}

ScoreInfo score_and_info(const BoundModel& bm, const Coefficients& coefs, std::size_t block,
                         const ScoreOptions& options) {
  if (block >= bm.blocks()) throw DomainError("score_and_info: block index out of range");
  const Eigen::MatrixXd eta = linear_predictors(bm, coefs);
  const Eigen::MatrixXd theta = responses_of(bm, eta);
  const FamilySpec& f = bm.family();
  const ResponseFunction& h = f.response(block);
  const std::size_t k = f.size();
  const bool use_expected = options.kind == InfoKind::expected ||
                            (options.kind == InfoKind::preferred && prefers_expected_info(f, block));

  const Eigen::Index n = bm.n();
  Eigen::VectorXd score(n);
  Eigen::VectorXd weight(n);
  double row[4];
  double ll = 0.0;
  const auto b = static_cast<Eigen::Index>(block);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) row[j] = theta(i, static_cast<Eigen::Index>(j));
    const ParamDerivs d = param_derivs(f, bm.y()[i], std::span<const double>(row, k), block);
    const double h1 = h.d1(eta(i, b));
    score[i] = d.d1 * h1;
    if (use_expected && !std::isnan(d.expected_info)) {
      weight[i] = d.expected_info * h1 * h1;
    } else {
      weight[i] = -(d.d2 * h1 * h1 + d.d1 * h.d2(eta(i, b)));
    }
    if (!std::isfinite(score[i]) || !std::isfinite(weight[i]) || std::isnan(d.log_density)) {
      throw NumericalError("non-finite score or information contribution for parameter '" +
                               f.parameters()[block].name + "'",
                           i);
    }
    ll += d.log_density;
  }

  const Eigen::MatrixXd& x = bm.design(block);
  ScoreInfo out;
  out.gradient = x.transpose() * score;
  out.information = x.transpose() * (x.array().colwise() * weight.array()).matrix();
  out.log_likelihood = ll;
  out.log_posterior = ll + prior_sum(bm, coefs);
  if (options.include_prior) {
    const PriorSpec& prior = bm.model().priors()[block];
    out.gradient += prior.gradient(coefs[block].beta);
    out.information.diagonal().array() += prior.precision();
  } else {
    out.log_posterior = ll;
  }
  out.information = 0.5 * (out.information + out.information.transpose()).eval();
  out.ridge = regularized_cholesky(out.information, options.max_ridge_doublings, out.cholesky);
  out.positive_definite = out.ridge >= 0.0;
  return out;
}

}  // namespace spreg
