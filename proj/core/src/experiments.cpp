#include "spreg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include "json.hpp"
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "spreg/diagnostics.hpp"
#include "spreg/errors.hpp"
#include "spreg/fit.hpp"
#include "spreg/mle.hpp"
#include "spreg/stats.hpp"

namespace spreg {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string key_name(const std::string& coef) { return coef == "(Intercept)" ? "intercept" : coef; }

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string format_chain(const ChainSettings& c) {
  std::ostringstream os;
  os << c.iterations << '/' << c.burnin << '/' << c.thin;
  return os.str();
}

Eigen::MatrixXd uniform_covariates(Eigen::Index n, Eigen::Index p, Rng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd x(n, p);
  // Row-major fill keeps a row's covariates adjacent in the stream.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = unif(rng);
  }
  return x;
}

Chain fit_chain(const ModelSpec& model, const DataBlock& data, ChainSettings settings, std::uint64_t seed) {
  settings.seed = seed;
  return run_chain(BoundModel(model, data), settings);
}

double median(std::vector<double> v) { return v.empty() ? std::nan("") : empirical_quantile(v, 0.5); }

ReplicationRecord guarded(int index, std::uint64_t seed, const std::function<void(ReplicationRecord&)>& body) {
  ReplicationRecord rec;
  rec.index = index;
  rec.seed = seed;
  try {
    body(rec);
  } catch (const NumericalError& e) {
    rec.diverged = true;
    rec.error = e.what();
    rec.values.clear();
  }
  return rec;
}

void count_outcomes(ExperimentReport& report) {
  report.replications = static_cast<int>(report.records.size());
  report.divergent = 0;
  for (const ReplicationRecord& r : report.records) report.divergent += r.diverged ? 1 : 0;
  report.effective = report.replications - report.divergent;
}

}  // namespace

double ReplicationRecord::value(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw DomainError("replication " + std::to_string(index) + " has no value '" + key + "'");
}

void ScenarioSpec::validate() const {
  if (family != FamilyKind::poisson) throw ConfigError("scenarios simulate Poisson data only");
  if (!dgp.positive()) throw ConfigError("scenario response '" + dgp.name() + "' is not positive");
  if (coefficients.size() != 4) throw ConfigError("scenario needs 4 coefficients (intercept, x1, x2, x3)");
  if (!coefficients.allFinite()) throw ConfigError("scenario coefficients must be finite");
  if (n < coefficients.size()) throw ConfigError("scenario n must be at least the number of coefficients");
  if (replications < 1) throw ConfigError("scenario needs at least one replication");
  chain.validate();
}

std::vector<std::string> ScenarioSpec::covariate_names() const {
  std::vector<std::string> names;
  for (Eigen::Index j = 1; j < coefficients.size(); ++j) names.push_back("x" + std::to_string(j));
  return names;
}

ModelSpec scenario_model(const ScenarioSpec& spec, const ResponseFunction& response) {
  return ModelSpec(FamilySpec::poisson(response), {PredictorSpec{"lambda", true, spec.covariate_names()}});
}

DataBlock simulate_dataset(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  const auto p = spec.coefficients.size() - 1;
  const Eigen::MatrixXd x = uniform_covariates(spec.n, p, rng);
  const Eigen::VectorXd eta =
      (x * spec.coefficients.tail(p)).array() + spec.coefficients[0];
  const FamilySpec fam = FamilySpec::poisson(spec.dgp);
  Eigen::VectorXd y(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const double lambda = spec.dgp.value(eta[i]);
    y[i] = sample(fam, std::span<const double>(&lambda, 1), rng);
  }
  return DataBlock(std::move(y), spec.covariate_names(), x);
}

double binomial_half_width(double rate, int replications, double z) {
  if (replications < 1) throw DomainError("binomial half-width needs R >= 1");
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("rate must lie in [0, 1]");
  return z * std::sqrt(rate * (1.0 - rate) / replications);
}

std::vector<ReplicationRecord> run_replications(int count, int threads,
                                                const std::function<ReplicationRecord(int)>& work) {
  std::vector<ReplicationRecord> out(static_cast<std::size_t>(std::max(count, 0)));
  const int workers = std::clamp(threads, 1, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto loop = [&] {
    for (int i = next++; i < count && !failed; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = work(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(loop);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ExperimentReport run_coverage_study(const ScenarioSpec& spec, int threads) {
  spec.validate();
  const auto t0 = Clock::now();
  const ModelSpec model = scenario_model(spec, spec.dgp);
  const std::vector<std::string> names = model.predictors()[0].coefficient_names();

  auto work = [&](int r) {
    const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));
    return guarded(r, seed, [&](ReplicationRecord& rec) {
      Rng rng(seed);
      const DataBlock data = simulate_dataset(spec, rng);
      const Chain chain = fit_chain(model, data, spec.chain, derive_seed(seed, 1));
      const PosteriorSummary s80 = summarize(chain, 0.80);
      const PosteriorSummary s95 = summarize(chain, 0.95);
      for (std::size_t k = 0; k < names.size(); ++k) {
        const double truth = spec.coefficients[static_cast<Eigen::Index>(k)];
        const std::string key = key_name(names[k]);
        rec.values.emplace_back("dev_" + key, s95.rows[k].mean - truth);
        rec.values.emplace_back("cover80_" + key, s80.rows[k].lower <= truth && truth <= s80.rows[k].upper);
        rec.values.emplace_back("cover95_" + key, s95.rows[k].lower <= truth && truth <= s95.rows[k].upper);
      }
      rec.values.emplace_back("acceptance", chain.acceptance_rate(0));
    });
  };

  ExperimentReport report;
  report.study = "coverage";
  report.config = {{"dgp", spec.dgp.name()},
                   {"coefficients", format_vector(spec.coefficients)},
                   {"n", std::to_string(spec.n)},
                   {"chain", format_chain(spec.chain)},
                   {"seed", std::to_string(spec.seed)}};
  report.threads = threads;
  report.records = run_replications(spec.replications, threads, work);
  count_outcomes(report);

  std::vector<bool> in_bias;
  for (const ReplicationRecord& rec : report.records) {
    bool keep = !rec.diverged;
    if (keep) {
      for (const std::string& nm : names) keep = keep && std::abs(rec.value("dev_" + key_name(nm))) <= kBiasExclusion;
      report.bias_excluded += keep ? 0 : 1;
    }
    in_bias.push_back(keep);
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    const std::string key = key_name(names[k]);
    CoefficientReport c;
    c.name = names[k];
    c.truth = spec.coefficients[static_cast<Eigen::Index>(k)];
    double dev = 0.0, c80 = 0.0, c95 = 0.0;
    int nb = 0;
    for (std::size_t r = 0; r < report.records.size(); ++r) {
      const ReplicationRecord& rec = report.records[r];
      if (rec.diverged) continue;
      c80 += rec.value("cover80_" + key);
      c95 += rec.value("cover95_" + key);
      if (in_bias[r]) {
        dev += rec.value("dev_" + key);
        ++nb;
      }
    }
    if (report.effective > 0) {
      c.coverage80 = c80 / report.effective;
      c.coverage95 = c95 / report.effective;
    }
    c.bias = nb > 0 ? dev / nb : std::nan("");
    report.coefficients.push_back(c);
  }
  report.runtime_seconds = seconds_since(t0);
  return report;
}

void DicSelectionSpec::validate() const {
  scenario.validate();
  if (!alternative.positive()) throw ConfigError("alternative response '" + alternative.name() + "' is not positive");
  if (alternative == scenario.dgp) throw ConfigError("alternative response must differ from the DGP response");
  if (thresholds.empty()) throw ConfigError("at least one DIC threshold is required");
}

ExperimentReport run_dic_selection_study(const DicSelectionSpec& spec, int threads) {
  spec.validate();
  const auto t0 = Clock::now();
  const ScenarioSpec& sc = spec.scenario;
  const ModelSpec correct = scenario_model(sc, sc.dgp);
  const ModelSpec wrong = scenario_model(sc, spec.alternative);

  auto work = [&](int r) {
    const std::uint64_t seed = derive_seed(sc.seed, static_cast<std::uint64_t>(r));
    return guarded(r, seed, [&](ReplicationRecord& rec) {
      Rng rng(seed);
      const DataBlock data = simulate_dataset(sc, rng);
      const BoundModel bc(correct, data);
      const BoundModel bw(wrong, data);
      ChainSettings cs = sc.chain;
      cs.seed = derive_seed(seed, 1);
      const DicResult dc = dic(run_chain(bc, cs), bc);
      cs.seed = derive_seed(seed, 2);
      const DicResult dw = dic(run_chain(bw, cs), bw);
      rec.values.emplace_back("dic_correct", dc.dic);
      rec.values.emplace_back("dic_wrong", dw.dic);
      rec.values.emplace_back("pd_correct", dc.effective_parameters);
      rec.values.emplace_back("pd_wrong", dw.effective_parameters);
      rec.values.emplace_back("dic_difference", dw.dic - dc.dic);
    });
  };

  ExperimentReport report;
  report.study = "dic_selection";
  report.config = {{"dgp", sc.dgp.name()},
                   {"alternative", spec.alternative.name()},
                   {"coefficients", format_vector(sc.coefficients)},
                   {"n", std::to_string(sc.n)},
                   {"chain", format_chain(sc.chain)},
                   {"seed", std::to_string(sc.seed)}};
  report.threads = threads;
  report.records = run_replications(sc.replications, threads, work);
  count_outcomes(report);
  for (double t : spec.thresholds) {
    int hits = 0;
    for (const ReplicationRecord& rec : report.records) {
      if (!rec.diverged && rec.value("dic_difference") > t) ++hits;
    }
    ThresholdRate tr;
    tr.threshold = t;
    if (report.effective > 0) {
      tr.rate = static_cast<double>(hits) / report.effective;
      tr.half_width = binomial_half_width(tr.rate, report.effective);
    }
    report.selection.push_back(tr);
  }
  report.runtime_seconds = seconds_since(t0);
  return report;
}

void GpdTailSpec::validate() const {
  if (n < 10) throw ConfigError("GPD tail study needs n >= 10");
  if (replications < 1) throw ConfigError("GPD tail study needs at least one replication");
  if (sigma_coefficients.size() != 2) throw ConfigError("sigma needs 2 coefficients (intercept, x1)");
  if (gamma_coefficients.size() != 3 || exp_gamma_coefficients.size() != 3) {
    throw ConfigError("gamma needs 3 coefficients (intercept, x1, x2)");
  }
  if (!(softplus_a > 0.0) || !std::isfinite(softplus_a)) throw ConfigError("softplus parameter must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("interval level must lie in (0, 1)");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw ConfigError("top fraction must lie in (0, 1]");
  chain.validate();
}

DataBlock simulate_gpd_dataset(const GpdTailSpec& spec, const ResponseFunction& gamma_response,
                               const Eigen::VectorXd& gamma_coefficients, Rng& rng) {
  const Eigen::MatrixXd x = uniform_covariates(spec.n, 2, rng);
  const FamilySpec fam = FamilySpec::gpd(ResponseFunction::exponential(), gamma_response);
  Eigen::VectorXd y(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const double theta[2] = {
        std::exp(spec.sigma_coefficients[0] + spec.sigma_coefficients[1] * x(i, 0)),
        gamma_response.value(gamma_coefficients[0] + gamma_coefficients[1] * x(i, 0) +
                             gamma_coefficients[2] * x(i, 1))};
    y[i] = sample(fam, theta, rng);
  }
  return DataBlock(std::move(y), {"x1", "x2"}, x);
}

ModelSpec gpd_tail_model(const ResponseFunction& gamma_response, bool covariates) {
  const FamilySpec fam = FamilySpec::gpd(ResponseFunction::exponential(), gamma_response);
  if (!covariates) return ModelSpec(fam, {PredictorSpec{"sigma", true, {}}, PredictorSpec{"gamma", true, {}}});
  return ModelSpec(fam, {PredictorSpec{"sigma", true, {"x1"}}, PredictorSpec{"gamma", true, {"x1", "x2"}}});
}

ExperimentReport run_gpd_tail_study(const GpdTailSpec& spec, int threads) {
  spec.validate();
  const auto t0 = Clock::now();
  const ResponseFunction sp = ResponseFunction::softplus(spec.softplus_a);
  const ResponseFunction ex = ResponseFunction::exponential();
  const ModelSpec m_sp = gpd_tail_model(sp);
  const ModelSpec m_ex = gpd_tail_model(ex);
  const ModelSpec m_null = gpd_tail_model(ex, false);
  const PredictRequest qreq{PredictTarget::quantile, spec.p};

  auto work = [&](int r) {
    const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));
    return guarded(r, seed, [&](ReplicationRecord& rec) {
      Rng rng(seed);
      const DataBlock data = simulate_gpd_dataset(spec, sp, spec.gamma_coefficients, rng);
      const BoundModel b_sp(m_sp, data), b_ex(m_ex, data), b_null(m_null, data);
      ChainSettings cs = spec.chain;
      cs.seed = derive_seed(seed, 1);
      const FitResult f_sp = FitResult::from_chain(m_sp, run_chain(b_sp, cs));
      cs.seed = derive_seed(seed, 2);
      const FitResult f_ex = FitResult::from_chain(m_ex, run_chain(b_ex, cs));
      cs.seed = derive_seed(seed, 3);
      const Chain c_null = run_chain(b_null, cs);

      const Eigen::MatrixXd q_sp = predict(f_sp, data, qreq);
      const Eigen::MatrixXd q_ex = predict(f_ex, data, qreq);
      rec.values.emplace_back("max_quantile_softplus", q_sp.maxCoeff());
      rec.values.emplace_back("max_quantile_exp", q_ex.maxCoeff());

      // Top decile of observations ranked by the exp fit's quantile estimate.
      const std::vector<WidthRatio> ratios = ci_width_ratio(f_sp, f_ex, data, spec.p, spec.level);
      std::vector<std::size_t> order(ratios.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return ratios[a].estimate_b > ratios[b].estimate_b; });
      const auto top = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(spec.top_fraction * static_cast<double>(order.size()))));
      std::vector<double> top_ratios, all_ratios;
      for (std::size_t i = 0; i < order.size(); ++i) {
        all_ratios.push_back(ratios[order[i]].ratio);
        if (i < top) top_ratios.push_back(ratios[order[i]].ratio);
      }
      rec.values.emplace_back("median_ratio_top", median(top_ratios));
      rec.values.emplace_back("median_ratio_all", median(all_ratios));

      rec.values.emplace_back("dic_softplus", dic(*f_sp.chain, b_sp).dic);
      rec.values.emplace_back("dic_exp", dic(*f_ex.chain, b_ex).dic);
      rec.values.emplace_back("dic_null", dic(c_null, b_null).dic);

      const RqrSet r_sp = rqr(f_sp, data, derive_seed(seed, 4));
      const RqrSet r_ex = rqr(f_ex, data, derive_seed(seed, 5));
      rec.values.emplace_back("ks_softplus", ks_distance_std_normal(r_sp.residuals));
      rec.values.emplace_back("ad_softplus", ad_statistic(r_sp).a2);
      rec.values.emplace_back("ad_exp", ad_statistic(r_ex).a2);

      // Calibration of the exp model on data from its own DGP (MLE plug-in).
      Rng rng_own(derive_seed(seed, 6));
      const DataBlock own = simulate_gpd_dataset(spec, ex, spec.exp_gamma_coefficients, rng_own);
      const MleResult mle = fit_mle(BoundModel(m_ex, own));
      const RqrSet r_own = rqr(m_ex, mle.coefficients, own, derive_seed(seed, 7));
      rec.values.emplace_back("ks_exp_own", ks_distance_std_normal(r_own.residuals));
    });
  };

  ExperimentReport report;
  report.study = "gpd_tail";
  report.config = {{"n", std::to_string(spec.n)},
                   {"sigma_coefficients", format_vector(spec.sigma_coefficients)},
                   {"gamma_coefficients", format_vector(spec.gamma_coefficients)},
                   {"exp_gamma_coefficients", format_vector(spec.exp_gamma_coefficients)},
                   {"softplus_a", format_vector((Eigen::VectorXd(1) << spec.softplus_a).finished())},
                   {"p", format_vector((Eigen::VectorXd(1) << spec.p).finished())},
                   {"chain", format_chain(spec.chain)},
                   {"seed", std::to_string(spec.seed)}};
  report.threads = threads;
  report.records = run_replications(spec.replications, threads, work);
  count_outcomes(report);

  int smaller = 0, null_worse = 0;
  std::vector<double> med_top, ks_sp, ks_own;
  for (const ReplicationRecord& rec : report.records) {
    if (rec.diverged) continue;
    smaller += rec.value("max_quantile_softplus") < rec.value("max_quantile_exp") ? 1 : 0;
    const double best = std::min(rec.value("dic_softplus"), rec.value("dic_exp"));
    null_worse += rec.value("dic_null") > best ? 1 : 0;
    med_top.push_back(rec.value("median_ratio_top"));
    ks_sp.push_back(rec.value("ks_softplus"));
    ks_own.push_back(rec.value("ks_exp_own"));
  }
  if (report.effective > 0) {
    const double e = report.effective;
    report.metrics["share_softplus_max_smaller"] = smaller / e;
    report.metrics["share_null_dic_worse"] = null_worse / e;
    report.metrics["median_ratio_top"] = median(med_top);
    report.metrics["max_ks_softplus"] = *std::max_element(ks_sp.begin(), ks_sp.end());
    report.metrics["max_ks_exp_own"] = *std::max_element(ks_own.begin(), ks_own.end());
  }
  report.runtime_seconds = seconds_since(t0);
  return report;
}

void write_report_json(std::ostream& os, const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["study"] = report.study;
  j["config"] = report.config;
  j["replications"] = report.replications;
  j["effective"] = report.effective;
  j["divergent"] = report.divergent;
  j["bias_excluded"] = report.bias_excluded;
  j["coefficients"] = nlohmann::ordered_json::array();
  for (const CoefficientReport& c : report.coefficients) {
    j["coefficients"].push_back(
        {{"name", c.name}, {"truth", c.truth}, {"bias", c.bias}, {"coverage80", c.coverage80}, {"coverage95", c.coverage95}});
  }
  j["selection"] = nlohmann::ordered_json::array();
  for (const ThresholdRate& t : report.selection) {
    j["selection"].push_back({{"threshold", t.threshold}, {"rate", t.rate}, {"half_width", t.half_width}});
  }
  j["metrics"] = report.metrics;
  j["records"] = nlohmann::ordered_json::array();
  for (const ReplicationRecord& r : report.records) {
    nlohmann::ordered_json rj{{"index", r.index}, {"seed", r.seed}, {"diverged", r.diverged}};
    if (r.diverged) rj["error"] = r.error;
    nlohmann::ordered_json vals = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.values) vals[k] = v;
    rj["values"] = std::move(vals);
    j["records"].push_back(std::move(rj));
  }
  j["runtime_seconds"] = report.runtime_seconds;
  j["threads"] = report.threads;
  os << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& os, const ExperimentReport& report) {
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const ReplicationRecord& r : report.records) {
    for (const auto& [k, v] : r.values) {
      if (seen.insert(k).second) keys.push_back(k);
    }
  }
  const auto old = os.precision(17);
  os << "index,seed,diverged";
  for (const std::string& k : keys) os << ',' << k;
  os << '\n';
  for (const ReplicationRecord& r : report.records) {
    os << r.index << ',' << r.seed << ',' << (r.diverged ? 1 : 0);
    for (const std::string& k : keys) {
      os << ',';
      for (const auto& [rk, v] : r.values) {
        if (rk == k) {
          os << v;
          break;
        }
      }
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace spreg
