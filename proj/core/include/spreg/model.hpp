#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spreg/family.hpp"

namespace spreg {

/// Response vector plus named covariate columns. Immutable once built.
class DataBlock {
 public:
  DataBlock() = default;
  /// Throws ConfigError on NaN/inf cells, duplicate names or shape mismatch.
  DataBlock(Eigen::VectorXd y, std::vector<std::string> names, Eigen::MatrixXd covariates);

  /// Exceedances y = z - threshold. Every z must exceed the threshold.
  static DataBlock exceedances(const Eigen::VectorXd& z, double threshold, std::vector<std::string> names,
                               Eigen::MatrixXd covariates);

  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& covariates() const noexcept { return x_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<double> threshold() const noexcept { return threshold_; }
  Eigen::Index n() const noexcept { return y_.size(); }

  /// Column index; throws ConfigError naming the column if absent.
  Eigen::Index column(const std::string& name) const;
  bool has_column(const std::string& name) const;

 private:
  Eigen::VectorXd y_;
  std::vector<std::string> names_;
  Eigen::MatrixXd x_;
  std::optional<double> threshold_;
};

/// Linear predictor for one distribution parameter: optional intercept plus named columns.
struct PredictorSpec {
  std::string parameter;
  bool intercept = true;
  std::vector<std::string> covariates;

  std::size_t size() const noexcept { return covariates.size() + (intercept ? 1 : 0); }
  /// "(Intercept)" followed by the covariate names.
  std::vector<std::string> coefficient_names() const;
};

struct CoefficientBlock {
  std::string parameter;
  Eigen::VectorXd beta;
};

using Coefficients = std::vector<CoefficientBlock>;

class PriorSpec {
 public:
  static PriorSpec flat() { return PriorSpec(0.0); }
  /// Independent N(0, sd^2) on every coefficient of the block.
  static PriorSpec normal(double sd);

  bool is_flat() const noexcept { return sd_ == 0.0; }
  double sd() const noexcept { return sd_; }

  /// Log density up to a constant, its gradient and negative Hessian diagonal.
  double log_density(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  double precision() const noexcept { return is_flat() ? 0.0 : 1.0 / (sd_ * sd_); }

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;

 private:
  explicit PriorSpec(double sd) : sd_(sd) {}
  double sd_;
};

/// Family with per-parameter response functions, predictors and priors.
/// Predictors and priors are stored in the family's parameter order.
class ModelSpec {
 public:
  /// Predictors may be given in any order; they are matched by parameter name.
  /// Missing priors default to flat.
  ModelSpec(FamilySpec family, std::vector<PredictorSpec> predictors, std::vector<PriorSpec> priors = {});

  const FamilySpec& family() const noexcept { return family_; }
  const std::vector<PredictorSpec>& predictors() const noexcept { return predictors_; }
  const std::vector<PriorSpec>& priors() const noexcept { return priors_; }
  std::size_t blocks() const noexcept { return predictors_.size(); }

 private:
  FamilySpec family_;
  std::vector<PredictorSpec> predictors_;
  std::vector<PriorSpec> priors_;
};

/// n x p design; first column all ones iff spec.intercept. Column order follows spec.
Eigen::MatrixXd build_design(const DataBlock& data, const PredictorSpec& spec);

/// eta = X beta.
Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& design, const CoefficientBlock& block);

/// A model paired with one data set: designs are built once and shared by
/// every likelihood evaluation.
class BoundModel {
 public:
  BoundModel(ModelSpec model, const DataBlock& data);

  const ModelSpec& model() const noexcept { return model_; }
  const FamilySpec& family() const noexcept { return model_.family(); }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& design(std::size_t block) const { return designs_.at(block); }
  std::size_t blocks() const noexcept { return designs_.size(); }
  Eigen::Index n() const noexcept { return y_.size(); }

  /// Zero coefficients with the right block shapes and names.
  Coefficients zero_coefficients() const;
  /// Throws DomainError if blocks do not conform to the designs.
  void check_conformable(const Coefficients& coefs) const;

 private:
  ModelSpec model_;
  Eigen::VectorXd y_;
  std::vector<Eigen::MatrixXd> designs_;
};

}  // namespace spreg
