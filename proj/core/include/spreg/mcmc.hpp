#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spreg/model.hpp"
#include "spreg/random.hpp"

namespace spreg {

struct ChainSettings {
  int iterations = 12000;
  int burnin = 2000;
  int thin = 1;
  std::uint64_t seed = 1;
  /// Start from the maximum likelihood estimate instead of the moment start.
  bool start_at_mode = true;

  /// Throws ConfigError unless iterations > burnin >= 0 and thin >= 1.
  void validate() const;
  /// Number of draws kept: floor((iterations - burnin) / thin).
  int stored() const;
};

/// Normal approximation of one block's full conditional at the current point:
/// mean theta + F^{-1} g, covariance F^{-1}. When F cannot be repaired into a
/// positive definite matrix the kernel degrades to a N(theta, 0.1^2 I) random walk.
struct ProposalState {
  std::size_t block = 0;
  Eigen::VectorXd theta;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information;  // including the ridge actually used
  Eigen::LLT<Eigen::MatrixXd> cholesky;
  Eigen::VectorXd mean;
  double log_posterior = 0.0;
  double log_likelihood = 0.0;
  bool iwls = true;

  /// log q(x | this state).
  double log_proposal_density(const Eigen::VectorXd& x) const;
};

inline constexpr double kRandomWalkScale = 0.1;
/// Ridge escalations tried before falling back to the random walk.
inline constexpr int kProposalRepairs = 3;

/// Throws NumericalError if the log posterior or its derivatives are not finite at coefs.
ProposalState make_proposal_state(const BoundModel& bm, const Coefficients& coefs, std::size_t block);

/// log of the MH ratio for moving from `from` to `to` (both built on the same other blocks),
/// including the asymmetric proposal correction.
double log_acceptance_ratio(const ProposalState& from, const ProposalState& to);

struct MhStep {
  bool accepted = false;
  ProposalState state;  // state at the chain's position after the step
};

/// One Metropolis-Hastings update of state.block. Proposals with non-finite
/// posterior are rejected.
MhStep mh_iwls_step(const BoundModel& bm, const Coefficients& current, const ProposalState& state, Rng& rng);

struct Chain {
  ChainSettings settings;
  std::vector<std::string> parameters;                      // block names
  std::vector<std::vector<std::string>> coefficient_names;  // per block
  std::vector<Eigen::MatrixXd> draws;                       // per block: stored x p_k
  std::vector<double> log_likelihood;                       // per stored draw
  std::vector<long> accepted;                               // per block
  std::vector<long> proposed;                               // per block
  long fallback_proposals = 0;

  std::size_t size() const noexcept { return log_likelihood.size(); }
  Coefficients sample(std::size_t s) const;
  Coefficients posterior_mean() const;
  double acceptance_rate(std::size_t block) const;
};

/// Block-wise MH with IWLS proposals; deterministic given settings.seed.
Chain run_chain(const BoundModel& bm, const ChainSettings& settings,
                const std::optional<Coefficients>& init = std::nullopt);

struct CoefSummary {
  std::string parameter;
  std::string name;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double exp_mean = 0.0;  // posterior mean of exp(beta)
};

struct PosteriorSummary {
  double level = 0.95;
  std::vector<CoefSummary> rows;
};

/// Sample means and equal-tailed (type-7) credible intervals at `level`.
PosteriorSummary summarize(const Chain& chain, double level = 0.95);

struct DicResult {
  double mean_deviance = 0.0;       // D-bar
  double deviance_at_mean = 0.0;    // D(theta-bar)
  double effective_parameters = 0.0;
  double dic = 0.0;                 // 2 D-bar - D(theta-bar)
};

DicResult dic(const Chain& chain, const BoundModel& bm);

}  // namespace spreg
