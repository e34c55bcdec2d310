#include "spreg/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spreg/errors.hpp"
#include "spreg/likelihood.hpp"
#include "spreg/mle.hpp"
#include "spreg/stats.hpp"

namespace spreg {

void ChainSettings::validate() const {
  if (burnin < 0) throw ConfigError("burn-in must be >= 0");
  if (iterations <= burnin) throw ConfigError("iterations must exceed burn-in");
  if (thin < 1) throw ConfigError("thinning must be >= 1");
}

int ChainSettings::stored() const { return (iterations - burnin) / thin; }

double ProposalState::log_proposal_density(const Eigen::VectorXd& x) const {
  const auto p = static_cast<double>(x.size());
  const double norm = -0.5 * p * std::log(2.0 * std::numbers::pi);
  if (!iwls) {
    const double s2 = kRandomWalkScale * kRandomWalkScale;
    return norm - 0.5 * p * std::log(s2) - 0.5 * (x - theta).squaredNorm() / s2;
  }
  const Eigen::VectorXd r = cholesky.matrixU() * (x - mean);
  const double half_logdet = cholesky.matrixLLT().diagonal().array().log().sum();
  return norm + half_logdet - 0.5 * r.squaredNorm();
}

ProposalState make_proposal_state(const BoundModel& bm, const Coefficients& coefs, std::size_t block) {
  ScoreOptions opts;
  opts.max_ridge_doublings = kProposalRepairs;
  ScoreInfo si = score_and_info(bm, coefs, block, opts);
  if (!std::isfinite(si.log_posterior)) throw NumericalError("log posterior is not finite");
  ProposalState st;
  st.block = block;
  st.theta = coefs[block].beta;
  st.gradient = std::move(si.gradient);
  st.log_posterior = si.log_posterior;
  st.log_likelihood = si.log_likelihood;
  st.iwls = si.positive_definite;
  if (st.iwls) {
    st.information = si.information;
    st.information.diagonal().array() += si.ridge;
    st.cholesky = std::move(si.cholesky);
    st.mean = st.theta + st.cholesky.solve(st.gradient);
    if (!st.mean.allFinite()) st.iwls = false;
  }
  if (!st.iwls) st.mean = st.theta;
  return st;
}

double log_acceptance_ratio(const ProposalState& from, const ProposalState& to) {
  return to.log_posterior - from.log_posterior + to.log_proposal_density(from.theta) -
         from.log_proposal_density(to.theta);
}

MhStep mh_iwls_step(const BoundModel& bm, const Coefficients& current, const ProposalState& state, Rng& rng) {
  std::normal_distribution<double> norm(0.0, 1.0);
  Eigen::VectorXd z(state.theta.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = norm(rng);
  Eigen::VectorXd x;
  if (state.iwls) {
    x = state.mean + state.cholesky.matrixU().solve(z);
  } else {
    x = state.theta + kRandomWalkScale * z;
  }
  // The uniform is drawn unconditionally so the stream does not depend on the branch taken.
  const double log_u = std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng));

  Coefficients cand = current;
  cand[state.block].beta = x;
  ProposalState next;
  try {
    next = make_proposal_state(bm, cand, state.block);
  } catch (const NumericalError&) {
    return {false, state};
  }
  const double ratio = log_acceptance_ratio(state, next);
  if (std::isfinite(ratio) && log_u < ratio) return {true, std::move(next)};
  return {false, state};
}

Coefficients Chain::sample(std::size_t s) const {
  if (s >= size()) throw StateError("chain sample index out of range");
  Coefficients out;
  for (std::size_t k = 0; k < draws.size(); ++k) {
    out.push_back({parameters[k], draws[k].row(static_cast<Eigen::Index>(s)).transpose()});
  }
  return out;
}

Coefficients Chain::posterior_mean() const {
  if (size() == 0) throw StateError("posterior mean of an empty chain");
  Coefficients out;
  for (std::size_t k = 0; k < draws.size(); ++k) {
    out.push_back({parameters[k], draws[k].colwise().mean().transpose()});
  }
  return out;
}

double Chain::acceptance_rate(std::size_t block) const {
  const long p = proposed.at(block);
  return p == 0 ? 0.0 : static_cast<double>(accepted.at(block)) / static_cast<double>(p);
}

Chain run_chain(const BoundModel& bm, const ChainSettings& settings, const std::optional<Coefficients>& init) {
  settings.validate();
  Coefficients coefs;
  if (init) {
    coefs = *init;
  } else if (settings.start_at_mode) {
    try {
      coefs = fit_mle(bm).coefficients;
    } catch (const NumericalError&) {
      coefs = init_coefficients(bm);
    }
  } else {
    coefs = init_coefficients(bm);
  }
  bm.check_conformable(coefs);

  const std::size_t nb = bm.blocks();
  const int stored = settings.stored();
  Chain chain;
  chain.settings = settings;
  for (std::size_t k = 0; k < nb; ++k) {
    const PredictorSpec& ps = bm.model().predictors()[k];
    chain.parameters.push_back(ps.parameter);
    chain.coefficient_names.push_back(ps.coefficient_names());
    chain.draws.emplace_back(stored, static_cast<Eigen::Index>(ps.size()));
  }
  chain.accepted.assign(nb, 0);
  chain.proposed.assign(nb, 0);
  chain.log_likelihood.reserve(static_cast<std::size_t>(stored));

  Rng rng(settings.seed);
  std::vector<std::optional<ProposalState>> states(nb);
  double current_ll = 0.0;
  int kept = 0;
  for (int it = 0; it < settings.iterations; ++it) {
    for (std::size_t k = 0; k < nb; ++k) {
      if (!states[k]) states[k] = make_proposal_state(bm, coefs, k);
      if (!states[k]->iwls) ++chain.fallback_proposals;
      MhStep step = mh_iwls_step(bm, coefs, *states[k], rng);
      ++chain.proposed[k];
      if (step.accepted) {
        ++chain.accepted[k];
        coefs[k].beta = step.state.theta;
        for (std::size_t j = 0; j < nb; ++j) {
          if (j != k) states[j].reset();
        }
      }
      states[k] = std::move(step.state);
      current_ll = states[k]->log_likelihood;
    }
    if (it >= settings.burnin && (it - settings.burnin + 1) % settings.thin == 0) {
      for (std::size_t k = 0; k < nb; ++k) chain.draws[k].row(kept) = coefs[k].beta.transpose();
      chain.log_likelihood.push_back(current_ll);
      ++kept;
    }
  }
  return chain;
}

PosteriorSummary summarize(const Chain& chain, double level) {
  if (chain.size() == 0) throw StateError("cannot summarize an empty chain");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("credible level must lie in (0, 1)");
  PosteriorSummary out;
  out.level = level;
  const double lo = 0.5 * (1.0 - level);
  const double hi = 0.5 * (1.0 + level);
  for (std::size_t k = 0; k < chain.draws.size(); ++k) {
    const Eigen::MatrixXd& d = chain.draws[k];
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      std::vector<double> col(d.col(j).data(), d.col(j).data() + d.rows());
      std::vector<double> ex(col.size());
      std::transform(col.begin(), col.end(), ex.begin(), [](double v) { return std::exp(v); });
      std::sort(col.begin(), col.end());
      CoefSummary row;
      row.parameter = chain.parameters[k];
      row.name = chain.coefficient_names[k][static_cast<std::size_t>(j)];
      row.mean = d.col(j).mean();
      row.lower = sorted_quantile(col, lo);
      row.upper = sorted_quantile(col, hi);
      row.exp_mean = sample_mean(ex);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

DicResult dic(const Chain& chain, const BoundModel& bm) {
  if (chain.size() == 0) throw StateError("DIC of an empty chain");
  double sum = 0.0;
  for (double ll : chain.log_likelihood) sum += -2.0 * ll;
  DicResult r;
  r.mean_deviance = sum / static_cast<double>(chain.size());
  r.deviance_at_mean = -2.0 * log_likelihood(bm, chain.posterior_mean());
  r.effective_parameters = r.mean_deviance - r.deviance_at_mean;
  r.dic = 2.0 * r.mean_deviance - r.deviance_at_mean;
  return r;
}

}  // namespace spreg
