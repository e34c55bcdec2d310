#include "spreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "spreg/errors.hpp"
#include "spreg/stats.hpp"

namespace spreg {
namespace {

double clip(double u, double c) { return std::clamp(u, c, 1.0 - c); }

// log Phi(z) and log(1 - Phi(z)) without cancellation in either tail.
double log_phi(double z) { return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2)); }
double log_phi_upper(double z) { return std::log(0.5 * std::erfc(z / std::numbers::sqrt2)); }

Eigen::MatrixXd quantiles_per_draw(const FitResult& fit, const DataBlock& newdata, double p) {
  const Chain& c = *fit.chain;
  Eigen::MatrixXd q(newdata.n(), static_cast<Eigen::Index>(c.size()));
  const PredictRequest req{PredictTarget::quantile, p};
  for (std::size_t s = 0; s < c.size(); ++s) {
    q.col(static_cast<Eigen::Index>(s)) = predict(fit.model, c.sample(s), newdata, req).col(0);
  }
  return q;
}

}  // namespace

RqrSet rqr(const ModelSpec& model, const Coefficients& coefs, const DataBlock& data, std::uint64_t seed) {
  const FamilySpec& f = model.family();
  const Eigen::MatrixXd theta = predict(model, coefs, data, {PredictTarget::parameters, 0.5});
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RqrSet out;
  out.seed = seed;
  out.residuals.reserve(static_cast<std::size_t>(data.n()));
  double row[4];
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < theta.cols(); ++j) row[j] = theta(i, j);
    const std::span<const double> t(row, static_cast<std::size_t>(theta.cols()));
    const double y = data.y()[i];
    double u;
    if (f.discrete()) {
      const double hi = cdf(f, y, t);
      const double lo = y >= 1.0 ? cdf(f, y - 1.0, t) : 0.0;
      // (lo, hi]: 1 - U(0,1) lies in (0, 1].
      u = lo + (hi - lo) * (1.0 - unif(rng));
    } else {
      u = cdf(f, y, t);
    }
    out.residuals.push_back(std_normal_quantile(clip(u, out.clip)));
  }
  return out;
}

RqrSet rqr(const FitResult& fit, const DataBlock& data, std::uint64_t seed) {
  return rqr(fit.model, fit.point, data, seed);
}

AdStatistic ad_statistic(std::span<const double> z) {
  if (z.size() < 2) throw DomainError("Anderson-Darling statistic needs at least 2 values");
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * static_cast<double>(i + 1) - 1.0;
    acc += w * (log_phi(s[i]) + log_phi_upper(s[n - 1 - i]));
  }
  const double nd = static_cast<double>(n);
  return {-nd - acc / nd, n};
}

std::vector<QqRow> qq_export(std::span<const double> z) {
  if (z.empty()) throw DomainError("QQ export needs at least one residual");
  std::vector<double> s(z.begin(), z.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  std::vector<QqRow> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back({std_normal_quantile((static_cast<double>(i) + 0.5) / n), s[i]});
  }
  return out;
}

void write_qq_csv(std::ostream& os, const std::vector<QqRow>& rows) {
  const auto old = os.precision(17);
  os << "theoretical,observed\n";
  for (const QqRow& r : rows) os << r.theoretical << ',' << r.observed << '\n';
  os.precision(old);
}

std::vector<QqRow> read_qq_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("theoretical,observed", 0) != 0) {
    throw ConfigError("QQ table must start with header 'theoretical,observed'");
  }
  std::vector<QqRow> out;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    QqRow r{};
    char comma = 0;
    if (!(ls >> r.theoretical >> comma >> r.observed) || comma != ',') throw ConfigError("malformed QQ row: " + line);
    out.push_back(r);
  }
  return out;
}

std::vector<WidthRatio> ci_width_ratio(const FitResult& a, const FitResult& b, const DataBlock& newdata, double p,
                                       double level) {
  if (!a.chain || !b.chain) throw StateError("CI width ratios need posterior draws for both fits");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
  const Eigen::MatrixXd qa = quantiles_per_draw(a, newdata, p);
  const Eigen::MatrixXd qb = quantiles_per_draw(b, newdata, p);
  const PredictRequest req{PredictTarget::quantile, p};
  const Eigen::MatrixXd ea = predict(a, newdata, req);
  const Eigen::MatrixXd eb = predict(b, newdata, req);
  const double lo = 0.5 * (1.0 - level);
  const double hi = 0.5 * (1.0 + level);
  auto width = [&](const Eigen::MatrixXd& q, Eigen::Index i) {
    std::vector<double> v(static_cast<std::size_t>(q.cols()));
    for (Eigen::Index s = 0; s < q.cols(); ++s) v[static_cast<std::size_t>(s)] = q(i, s);
    std::sort(v.begin(), v.end());
    return sorted_quantile(v, hi) - sorted_quantile(v, lo);
  };
  std::vector<WidthRatio> out;
  out.reserve(static_cast<std::size_t>(newdata.n()));
  for (Eigen::Index i = 0; i < newdata.n(); ++i) {
    WidthRatio r;
    r.obs_id = static_cast<long>(i);
    r.width_a = width(qa, i);
    r.width_b = width(qb, i);
    r.estimate_a = ea(i, 0);
    r.estimate_b = eb(i, 0);
    if (r.width_b == 0.0) {
      r.degenerate = true;
      r.ratio = 1.0;
    } else {
      r.ratio = r.width_a / r.width_b;
    }
    out.push_back(r);
  }
  return out;
}

void write_ratio_csv(std::ostream& os, const std::vector<WidthRatio>& rows) {
  const auto old = os.precision(17);
  os << "obs_id,ratio\n";
  for (const WidthRatio& r : rows) os << r.obs_id << ',' << r.ratio << '\n';
  os.precision(old);
}

}  // namespace spreg
