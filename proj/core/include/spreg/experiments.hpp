#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spreg/mcmc.hpp"
#include "spreg/model.hpp"
#include "spreg/response.hpp"

namespace spreg {

/// Poisson regression on three U(-1, 1) covariates x1, x2, x3.
struct ScenarioSpec {
  ResponseFunction dgp = ResponseFunction::softplus(1.0);
  FamilyKind family = FamilyKind::poisson;
  Eigen::VectorXd coefficients = (Eigen::VectorXd(4) << 1.0, 0.5, 1.0, 2.0).finished();
  int n = 1000;
  int replications = 200;
  ChainSettings chain{6000, 1000, 1, 1, true};
  std::uint64_t seed = 1;

  /// Throws ConfigError unless family is poisson, the dgp response is positive,
  /// n >= number of coefficients, R >= 1 and the chain settings are valid.
  void validate() const;
  std::vector<std::string> covariate_names() const;
};

/// Model fitted to scenario data: Poisson with the given response on all covariates.
ModelSpec scenario_model(const ScenarioSpec& spec, const ResponseFunction& response);

DataBlock simulate_dataset(const ScenarioSpec& spec, Rng& rng);

/// Replications with any |posterior mean - truth| above this are left out of
/// the bias average but still enter coverage.
inline constexpr double kBiasExclusion = 5.0;

struct CoefficientReport {
  std::string name;
  double truth = 0.0;
  double bias = 0.0;
  double coverage80 = 0.0;
  double coverage95 = 0.0;
};

struct ThresholdRate {
  double threshold = 0.0;
  double rate = 0.0;
  double half_width = 0.0;  // 95% normal-approximation half-width
};

/// One replication. Flat name -> value metrics; empty when the replication diverged.
struct ReplicationRecord {
  int index = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string error;
  std::vector<std::pair<std::string, double>> values;

  double value(const std::string& key) const;
};

struct ExperimentReport {
  std::string study;
  std::map<std::string, std::string> config;  // echo of the scenario
  int replications = 0;
  int effective = 0;   // replications that did not diverge
  int divergent = 0;
  int bias_excluded = 0;
  std::vector<CoefficientReport> coefficients;
  std::vector<ThresholdRate> selection;
  std::map<std::string, double> metrics;
  std::vector<ReplicationRecord> records;
  double runtime_seconds = 0.0;
  int threads = 1;
};

/// 95% normal-approximation half-width z * sqrt(rate (1 - rate) / R).
double binomial_half_width(double rate, int replications, double z = 1.959963984540054);

/// Runs work(i) for i in [0, count) on up to `threads` workers. Results land at
/// index i, so the output does not depend on scheduling.
std::vector<ReplicationRecord> run_replications(int count, int threads,
                                                const std::function<ReplicationRecord(int)>& work);

ExperimentReport run_coverage_study(const ScenarioSpec& spec, int threads = 1);

struct DicSelectionSpec {
  ScenarioSpec scenario;  // scenario.dgp is the correct model
  ResponseFunction alternative = ResponseFunction::softplus(5.0);
  std::vector<double> thresholds{0.0, 1.0, 10.0, 100.0};

  void validate() const;
};

/// A replication selects the correct model at threshold t iff DIC(wrong) - DIC(correct) > t.
ExperimentReport run_dic_selection_study(const DicSelectionSpec& spec, int threads = 1);

/// GPD exceedances with sigma = exp(s0 + s1 x1) and gamma = softplus_1(g0 + g1 x1 + g2 x2).
/// Default coefficients keep gamma inside (0.17, 0.88).
struct GpdTailSpec {
  int n = 2000;
  int replications = 20;
  Eigen::VectorXd sigma_coefficients = (Eigen::VectorXd(2) << 1.0, 0.3).finished();
  Eigen::VectorXd gamma_coefficients = (Eigen::VectorXd(3) << -0.65, 0.5, 0.5).finished();
  /// Coefficients of the exp-shape data set used for the exp model's own calibration check.
  Eigen::VectorXd exp_gamma_coefficients = (Eigen::VectorXd(3) << -1.2, 0.5, 0.5).finished();
  double softplus_a = 1.0;
  double p = 0.999;
  double level = 0.95;
  double top_fraction = 0.1;
  ChainSettings chain{6000, 1000, 5, 1, true};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Data set from the GPD DGP. `gamma_response` and coefficients select the shape curve.
DataBlock simulate_gpd_dataset(const GpdTailSpec& spec, const ResponseFunction& gamma_response,
                               const Eigen::VectorXd& gamma_coefficients, Rng& rng);

/// GPD model with exp scale on x1 and the given shape response on x1, x2;
/// covariates=false gives the intercept-only model.
ModelSpec gpd_tail_model(const ResponseFunction& gamma_response, bool covariates = true);

ExperimentReport run_gpd_tail_study(const GpdTailSpec& spec, int threads = 1);

/// JSON report: every field above, records included.
void write_report_json(std::ostream& os, const ExperimentReport& report);
/// One row per replication: index, seed, diverged, then the metric columns.
void write_report_csv(std::ostream& os, const ExperimentReport& report);

}  // namespace spreg
