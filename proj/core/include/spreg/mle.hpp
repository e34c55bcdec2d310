#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spreg/model.hpp"

namespace spreg {

struct MleOptions {
  double gradient_tolerance = 1e-6;  // max block gradient inf-norm
  int max_iterations = 200;          // outer (all-block) sweeps
  int max_halvings = 30;
};

struct MleResult {
  Coefficients coefficients;
  /// Observed information per block at the optimum (symmetric, before any ridge).
  std::vector<Eigen::MatrixXd> information;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  /// Log likelihood after each outer sweep, starting with the initial value.
  std::vector<double> trace;

  /// Wald standard errors from the inverse observed information of each block.
  std::vector<Eigen::VectorXd> standard_errors() const;
};

/// Moment-based start: intercept h^{-1}(moment estimate), other coefficients zero.
/// Estimates that fall outside h's range are replaced by h^{-1}(1e-3).
Coefficients init_coefficients(const BoundModel& bm);

/// Cyclic block-wise Fisher scoring with step halving. Priors are ignored.
/// Non-convergence is flagged in the result; an information matrix that stays
/// singular after ridge escalation throws NumericalError.
MleResult fit_mle(const BoundModel& bm, const std::optional<Coefficients>& init = std::nullopt,
                  const MleOptions& options = {});

}  // namespace spreg
