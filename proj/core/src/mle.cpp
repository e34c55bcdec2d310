#include "spreg/mle.hpp"

#include <algorithm>
#include <cmath>

#include "spreg/errors.hpp"
#include "spreg/likelihood.hpp"

namespace spreg {
namespace {

constexpr double kFallback = 1e-3;

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const Eigen::VectorXd& v) {
  Moments m;
  if (v.size() == 0) return m;
  m.mean = v.mean();
  if (v.size() > 1) m.var = (v.array() - m.mean).square().sum() / static_cast<double>(v.size() - 1);
  return m;
}

// Moment estimates of each distribution parameter, NaN when undefined.
std::vector<double> moment_estimates(const FamilySpec& f, const Eigen::VectorXd& y) {
  const Moments all = moments(y);
  auto dispersion = [&](const Moments& m) {
    if (f.nb_variance() == NbVariance::quadratic) {
      // Near-Poisson data: a large size parameter rather than an undefined one.
      return m.var > m.mean * 1.001 ? m.mean * m.mean / (m.var - m.mean) : 1e3;
    }
    return m.mean > 0.0 ? m.var / m.mean - 1.0 : std::nan("");
  };
  switch (f.kind()) {
    case FamilyKind::poisson: return {all.mean};
    case FamilyKind::negbin: return {all.mean, dispersion(all)};
    case FamilyKind::za_negbin: {
      std::vector<double> pos;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0) pos.push_back(y[i]);
      }
      const Moments mp = moments(Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size())));
      const double n = static_cast<double>(y.size());
      double pi = 1.0 - static_cast<double>(pos.size()) / n;
      pi = std::clamp(pi, 0.5 / n, 1.0 - 0.5 / n);
      return {mp.mean, dispersion(mp), pi};
    }
    case FamilyKind::normal_ls: return {all.mean, std::sqrt(all.var)};
    case FamilyKind::gpd: {
      if (!(all.var > 0.0)) return {all.mean, std::nan("")};
      const double ratio = all.mean * all.mean / all.var;
      return {0.5 * all.mean * (1.0 + ratio), 0.5 * (1.0 - ratio)};
    }
  }
  return {};
}

}  // namespace

std::vector<Eigen::VectorXd> MleResult::standard_errors() const {
  std::vector<Eigen::VectorXd> out;
  for (const auto& info : information) {
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      out.push_back(Eigen::VectorXd::Constant(info.rows(), std::nan("")));
      continue;
    }
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
    out.push_back(cov.diagonal().cwiseSqrt());
  }
  return out;
}

Coefficients init_coefficients(const BoundModel& bm) {
  Coefficients coefs = bm.zero_coefficients();
  const FamilySpec& f = bm.family();
  const std::vector<double> est = moment_estimates(f, bm.y());
  for (std::size_t k = 0; k < bm.blocks(); ++k) {
    if (!bm.model().predictors()[k].intercept) continue;
    const ResponseFunction& h = f.response(k);
    double start;
    try {
      start = h.inverse(est[k]);
      if (!std::isfinite(start)) throw DomainError("non-finite start");
    } catch (const DomainError&) {
      start = h.inverse(kFallback);
    }
    coefs[k].beta[0] = start;
  }
  return coefs;
}

MleResult fit_mle(const BoundModel& bm, const std::optional<Coefficients>& init, const MleOptions& options) {
  MleResult res;
  res.coefficients = init ? *init : init_coefficients(bm);
  bm.check_conformable(res.coefficients);

  ScoreOptions score_opts;
  score_opts.include_prior = false;

  double ll = log_likelihood(bm, res.coefficients);
  if (!std::isfinite(ll)) throw NumericalError("log likelihood is not finite at the starting values");
  res.trace.push_back(ll);

  for (res.iterations = 0; res.iterations < options.max_iterations;) {
    ++res.iterations;
    double max_grad = 0.0;
    for (std::size_t k = 0; k < bm.blocks(); ++k) {
      const ScoreInfo si = score_and_info(bm, res.coefficients, k, score_opts);
      if (!si.positive_definite) throw NumericalError("information matrix of block '" + res.coefficients[k].parameter +
                                                      "' is singular after ridge escalation");
      max_grad = std::max(max_grad, si.gradient.lpNorm<Eigen::Infinity>());
      const Eigen::VectorXd step = si.cholesky.solve(si.gradient);
      const Eigen::VectorXd start = res.coefficients[k].beta;
      double scale = 1.0;
      bool accepted = false;
      for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
        res.coefficients[k].beta = start + scale * step;
        const double cand = log_likelihood(bm, res.coefficients);
        // Tolerate rounding-level decreases near the optimum.
        if (std::isfinite(cand) && cand >= ll - 1e-12 * (1.0 + std::abs(ll))) {
          ll = cand;
          accepted = true;
          break;
        }
      }
      if (!accepted) res.coefficients[k].beta = start;
    }
    res.trace.push_back(ll);
    res.gradient_norm = max_grad;
    if (max_grad < options.gradient_tolerance) {
      res.converged = true;
      break;
    }
  }

  // Final gradient and observed information at the reported optimum.
  ScoreOptions obs = score_opts;
  obs.kind = InfoKind::observed;
  double max_grad = 0.0;
  res.information.clear();
  for (std::size_t k = 0; k < bm.blocks(); ++k) {
    const ScoreInfo si = score_and_info(bm, res.coefficients, k, obs);
    max_grad = std::max(max_grad, si.gradient.lpNorm<Eigen::Infinity>());
    res.information.push_back(si.information);
  }
  res.gradient_norm = max_grad;
  res.converged = max_grad < options.gradient_tolerance;
  res.log_likelihood = log_likelihood(bm, res.coefficients);
  return res;
}

}  // namespace spreg
