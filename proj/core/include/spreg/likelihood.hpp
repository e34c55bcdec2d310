#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "spreg/model.hpp"

namespace spreg {

enum class InfoKind {
  preferred,  // expected information where the family has a closed form, observed otherwise
  observed,   // negative Hessian of the log posterior
  expected,   // expected information; falls back to observed where unavailable
};

/// n x K matrix of distribution parameters h_k(eta_k).
Eigen::MatrixXd parameter_values(const BoundModel& bm, const Coefficients& coefs);

/// Sum of log densities. -inf when any observation has zero likelihood or invalid parameters.
double log_likelihood(const BoundModel& bm, const Coefficients& coefs);

/// Log likelihood plus the log priors of every block.
double log_posterior(const BoundModel& bm, const Coefficients& coefs);

struct ScoreInfo {
  Eigen::VectorXd gradient;      // d log posterior / d beta_block
  Eigen::MatrixXd information;   // -Hessian (or expected version), symmetric, before repair
  double log_likelihood = 0.0;
  double log_posterior = 0.0;
  double ridge = 0.0;            // added to the diagonal to reach positive definiteness
  bool positive_definite = false;
  Eigen::LLT<Eigen::MatrixXd> cholesky;  // of information + ridge * I, valid iff positive_definite
};

struct ScoreOptions {
  InfoKind kind = InfoKind::preferred;
  /// Ridge escalations (start 1e-6 * max diag, doubling) before giving up.
  int max_ridge_doublings = 60;
  bool include_prior = true;
};

/// Gradient and information of the log posterior with respect to one block,
/// chained through h' and h'' of the block's response function.
/// Throws NumericalError naming the row if any contribution is non-finite.
ScoreInfo score_and_info(const BoundModel& bm, const Coefficients& coefs, std::size_t block,
                         const ScoreOptions& options = {});

/// Cholesky of info, adding a ridge 1e-6 * max|diag| (doubling) until it succeeds.
/// Returns the ridge used, or a negative value if max_doublings escalations failed.
double regularized_cholesky(const Eigen::MatrixXd& info, int max_doublings, Eigen::LLT<Eigen::MatrixXd>& out);

}  // namespace spreg
