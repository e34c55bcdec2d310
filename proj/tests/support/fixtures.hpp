#pragma once
// Test fixtures: a grid of models over every family and response combination,
// random data sets drawn from them, and finite-difference oracles.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "spreg/family.hpp"
#include "spreg/likelihood.hpp"
#include "spreg/model.hpp"
#include "spreg/random.hpp"

namespace spreg::testing {

struct ModelCase {
  std::string label;
  ModelSpec model;
  Coefficients truth;
};

inline std::vector<ResponseFunction> positive_responses() {
  return {ResponseFunction::exponential(), ResponseFunction::softplus(1.0), ResponseFunction::softplus(10.0)};
}

/// Parameter value around which data are generated.
inline double typical_value(FamilyKind kind, NbVariance var, const std::string& parameter) {
  if (parameter == "pi") return 0.3;
  if (parameter == "theta") return var == NbVariance::quadratic ? 2.0 : 0.8;
  if (kind == FamilyKind::gpd) return parameter == "sigma" ? 2.0 : 0.3;
  if (kind == FamilyKind::normal_ls) return parameter == "mu" ? 1.0 : 1.5;
  return 3.0;
}

inline ModelCase make_case(FamilyKind kind, NbVariance var, const std::vector<ResponseFunction>& responses) {
  const FamilySpec fam = FamilySpec::make(kind, responses, var);
  std::vector<PredictorSpec> preds;
  Coefficients truth;
  std::string label = to_string(kind);
  if (kind == FamilyKind::negbin || kind == FamilyKind::za_negbin) label += "/" + to_string(var);
  for (std::size_t k = 0; k < fam.size(); ++k) {
    const std::string& name = fam.parameters()[k].name;
    // First block gets two covariates, the others one.
    preds.push_back({name, true, k == 0 ? std::vector<std::string>{"x1", "x2"} : std::vector<std::string>{"x1"}});
    Eigen::VectorXd b = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(preds.back().size()), 0.2);
    b[0] = fam.response(k).inverse(typical_value(kind, var, name));
    if (k == 0 && b.size() > 2) b[2] = -0.15;
    truth.push_back({name, b});
    label += " " + name + ":" + fam.response(k).name();
  }
  return {label, ModelSpec(fam, preds), truth};
}

/// Every family with every positive-parameter response from positive_responses().
inline std::vector<ModelCase> model_grid() {
  std::vector<ModelCase> out;
  const auto pos = positive_responses();
  for (const auto& h : pos) out.push_back(make_case(FamilyKind::poisson, NbVariance::quadratic, {h}));
  for (NbVariance v : {NbVariance::quadratic, NbVariance::linear}) {
    for (const auto& h1 : pos) {
      for (const auto& h2 : pos) {
        out.push_back(make_case(FamilyKind::negbin, v, {h1, h2}));
        out.push_back(make_case(FamilyKind::za_negbin, v, {h1, h2, ResponseFunction::logistic()}));
      }
    }
  }
  for (const auto& h : pos) {
    out.push_back(make_case(FamilyKind::normal_ls, NbVariance::quadratic, {ResponseFunction::identity(), h}));
  }
  for (const auto& h1 : pos) {
    for (const auto& h2 : pos) out.push_back(make_case(FamilyKind::gpd, NbVariance::quadratic, {h1, h2}));
  }
  return out;
}

/// Covariates x1, x2 ~ U(-1, 1) and y drawn from the model at `coefs`.
inline DataBlock simulate(const ModelSpec& model, const Coefficients& coefs, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = unif(rng);
    x(i, 1) = unif(rng);
  }
  DataBlock proto(Eigen::VectorXd::Zero(n), {"x1", "x2"}, x);
  const BoundModel bm(model, proto);
  const Eigen::MatrixXd theta = parameter_values(bm, coefs);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd t = theta.row(i).transpose();
    y[i] = sample(model.family(), std::span<const double>(t.data(), static_cast<std::size_t>(t.size())), rng);
  }
  return DataBlock(std::move(y), {"x1", "x2"}, std::move(x));
}

/// Coefficients jittered by N(0, sd^2) so gradients are not near zero.
inline Coefficients jitter(Coefficients c, double sd, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  for (CoefficientBlock& b : c) {
    for (Eigen::Index j = 0; j < b.beta.size(); ++j) b.beta[j] += z(rng);
  }
  return c;
}

/// Central finite-difference gradient of the log posterior in one block.
inline Eigen::VectorXd fd_gradient(const BoundModel& bm, Coefficients c, std::size_t block, double h = 1e-5) {
  Eigen::VectorXd g(c[block].beta.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double b0 = c[block].beta[j];
    const double step = h * std::max(1.0, std::abs(b0));
    c[block].beta[j] = b0 + step;
    const double up = log_posterior(bm, c);
    c[block].beta[j] = b0 - step;
    const double dn = log_posterior(bm, c);
    c[block].beta[j] = b0;
    g[j] = (up - dn) / (2.0 * step);
  }
  return g;
}

/// Negative Hessian by central differences of the analytic gradient.
inline Eigen::MatrixXd fd_information(const BoundModel& bm, Coefficients c, std::size_t block, double h = 1e-5) {
  const Eigen::Index p = c[block].beta.size();
  Eigen::MatrixXd info(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double b0 = c[block].beta[j];
    const double step = h * std::max(1.0, std::abs(b0));
    c[block].beta[j] = b0 + step;
    const Eigen::VectorXd up = score_and_info(bm, c, block).gradient;
    c[block].beta[j] = b0 - step;
    const Eigen::VectorXd dn = score_and_info(bm, c, block).gradient;
    c[block].beta[j] = b0;
    info.col(j) = -(up - dn) / (2.0 * step);
  }
  return 0.5 * (info + info.transpose());
}

/// max |a - b| / max |b|.
inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-12);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace spreg::testing
