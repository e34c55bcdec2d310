#include "spreg/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spreg/errors.hpp"

namespace spreg {

DataBlock::DataBlock(Eigen::VectorXd y, std::vector<std::string> names, Eigen::MatrixXd covariates)
    : y_(std::move(y)), names_(std::move(names)), x_(std::move(covariates)) {
  if (x_.cols() != static_cast<Eigen::Index>(names_.size())) {
    throw ConfigError("DataBlock: " + std::to_string(names_.size()) + " column names for " +
                      std::to_string(x_.cols()) + " columns");
  }
  if (x_.cols() > 0 && x_.rows() != y_.size()) {
    throw ConfigError("DataBlock: response has " + std::to_string(y_.size()) + " rows, covariates " +
                      std::to_string(x_.rows()));
  }
  if (x_.cols() == 0) x_.resize(y_.size(), 0);
  std::set<std::string> seen;
  for (const auto& nm : names_) {
    if (!seen.insert(nm).second) throw ConfigError("DataBlock: duplicate column '" + nm + "'");
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i])) throw ConfigError("DataBlock: missing or non-finite response in row " + std::to_string(i));
    for (Eigen::Index j = 0; j < x_.cols(); ++j) {
      if (!std::isfinite(x_(i, j))) {
        throw ConfigError("DataBlock: missing or non-finite value in row " + std::to_string(i) + ", column '" +
                          names_[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
}

DataBlock DataBlock::exceedances(const Eigen::VectorXd& z, double threshold, std::vector<std::string> names,
                                 Eigen::MatrixXd covariates) {
  Eigen::VectorXd y = z.array() - threshold;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) {
      throw ConfigError("DataBlock: observation in row " + std::to_string(i) + " does not exceed the threshold");
    }
  }
  DataBlock out(std::move(y), std::move(names), std::move(covariates));
  out.threshold_ = threshold;
  return out;
}

Eigen::Index DataBlock::column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ConfigError("unknown column '" + name + "'");
  return static_cast<Eigen::Index>(it - names_.begin());
}

bool DataBlock::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::vector<std::string> PredictorSpec::coefficient_names() const {
  std::vector<std::string> out;
  if (intercept) out.emplace_back("(Intercept)");
  out.insert(out.end(), covariates.begin(), covariates.end());
  return out;
}

PriorSpec PriorSpec::normal(double sd) {
  if (!(sd > 0.0) || !std::isfinite(sd)) throw ConfigError("normal prior needs a finite sd > 0");
  return PriorSpec(sd);
}

double PriorSpec::log_density(const Eigen::VectorXd& beta) const {
  if (is_flat()) return 0.0;
  return -0.5 * beta.squaredNorm() * precision();
}

Eigen::VectorXd PriorSpec::gradient(const Eigen::VectorXd& beta) const {
  if (is_flat()) return Eigen::VectorXd::Zero(beta.size());
  return -beta * precision();
}

ModelSpec::ModelSpec(FamilySpec family, std::vector<PredictorSpec> predictors, std::vector<PriorSpec> priors)
    : family_(std::move(family)) {
  const std::size_t k = family_.size();
  if (predictors.size() != k) {
    throw ConfigError(to_string(family_.kind()) + " needs " + std::to_string(k) + " predictors, got " +
                      std::to_string(predictors.size()));
  }
  if (!priors.empty() && priors.size() != k) throw ConfigError("one prior per predictor block expected");
  predictors_.resize(k);
  priors_.assign(k, PriorSpec::flat());
  std::vector<bool> filled(k, false);
  for (std::size_t i = 0; i < predictors.size(); ++i) {
    const std::size_t idx = family_.index_of(predictors[i].parameter);
    if (filled[idx]) throw ConfigError("duplicate predictor for parameter '" + predictors[i].parameter + "'");
    filled[idx] = true;
    if (predictors[i].size() == 0) throw ConfigError("predictor for '" + predictors[i].parameter + "' is empty");
    predictors_[idx] = std::move(predictors[i]);
    if (!priors.empty()) priors_[idx] = priors[i];
  }
}

Eigen::MatrixXd build_design(const DataBlock& data, const PredictorSpec& spec) {
  const Eigen::Index n = data.n();
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(spec.size()));
  Eigen::Index col = 0;
  if (spec.intercept) x.col(col++).setOnes();
  for (const auto& name : spec.covariates) {
    if (!data.has_column(name)) {
      throw ConfigError("predictor for '" + spec.parameter + "' references missing column '" + name + "'");
    }
    x.col(col++) = data.covariates().col(data.column(name));
  }
  return x;
}

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& design, const CoefficientBlock& block) {
  if (design.cols() != block.beta.size()) {
    throw DomainError("linear_predictor: design has " + std::to_string(design.cols()) + " columns, block '" +
                      block.parameter + "' has " + std::to_string(block.beta.size()) + " coefficients");
  }
  return design * block.beta;
}

BoundModel::BoundModel(ModelSpec model, const DataBlock& data) : model_(std::move(model)), y_(data.y()) {
  for (const auto& spec : model_.predictors()) {
    designs_.push_back(build_design(data, spec));
    if (data.n() < static_cast<Eigen::Index>(spec.size())) {
      throw ConfigError("predictor for '" + spec.parameter + "' has more coefficients than observations");
    }
  }
}

Coefficients BoundModel::zero_coefficients() const {
  Coefficients out;
  for (std::size_t k = 0; k < designs_.size(); ++k) {
    out.push_back({model_.predictors()[k].parameter, Eigen::VectorXd::Zero(designs_[k].cols())});
  }
  return out;
}

void BoundModel::check_conformable(const Coefficients& coefs) const {
  if (coefs.size() != designs_.size()) throw DomainError("coefficient block count does not match the model");
  for (std::size_t k = 0; k < designs_.size(); ++k) {
    if (coefs[k].beta.size() != designs_[k].cols()) {
      throw DomainError("coefficient block '" + coefs[k].parameter + "' does not conform to its design");
    }
  }
}

}  // namespace spreg
