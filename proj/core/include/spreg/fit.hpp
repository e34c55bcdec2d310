#pragma once

#include <Eigen/Dense>
#include <optional>

#include "spreg/mcmc.hpp"
#include "spreg/mle.hpp"
#include "spreg/model.hpp"

namespace spreg {

/// A fitted model: the point estimate used for prediction (MLE or posterior
/// mean) plus whatever the inference produced.
struct FitResult {
  ModelSpec model;
  Coefficients point;
  std::optional<MleResult> mle;
  std::optional<Chain> chain;

  static FitResult from_mle(ModelSpec model, MleResult mle);
  static FitResult from_chain(ModelSpec model, Chain chain);
};

enum class PredictTarget { parameters, mean, quantile };

struct PredictRequest {
  PredictTarget target = PredictTarget::parameters;
  double p = 0.5;  // quantile level when target == quantile
};

/// n x K parameter matrix for `parameters`, n x 1 otherwise. Uses the plug-in point estimate.
Eigen::MatrixXd predict(const FitResult& fit, const DataBlock& newdata, const PredictRequest& request);

/// Same, for an explicit coefficient set (e.g. one posterior draw).
Eigen::MatrixXd predict(const ModelSpec& model, const Coefficients& coefs, const DataBlock& newdata,
                        const PredictRequest& request);

}  // namespace spreg
