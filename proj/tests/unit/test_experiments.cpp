#include <doctest.h>

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "spreg/errors.hpp"
#include "spreg/experiments.hpp"
#include "spreg/fit.hpp"

using namespace spreg;
using doctest::Approx;

TEST_CASE("scenario simulation") {
  ScenarioSpec s;
  s.n = 20;
  CHECK(s.covariate_names() == std::vector<std::string>{"x1", "x2", "x3"});
  Rng a(5), b(5);
  const DataBlock d1 = simulate_dataset(s, a);
  const DataBlock d2 = simulate_dataset(s, b);
  CHECK(d1.y() == d2.y());
  CHECK(d1.covariates() == d2.covariates());
  CHECK(d1.covariates().cwiseAbs().maxCoeff() <= 1.0);
  for (double y : d1.y()) CHECK(y == std::floor(y));
}

TEST_CASE("zero slopes give a constant rate") {
  ScenarioSpec s;
  s.dgp = ResponseFunction::softplus(10.0);
  s.coefficients = (Eigen::VectorXd(4) << s.dgp.inverse(1.0), 0.0, 0.0, 0.0).finished();
  s.n = 100000;
  Rng rng(11);
  const DataBlock d = simulate_dataset(s, rng);
  // Poisson(1) mean; 4 standard errors.
  CHECK(std::abs(d.y().mean() - 1.0) < 4.0 / std::sqrt(1e5));
}

TEST_CASE("scenario validation") {
  ScenarioSpec s;
  s.family = FamilyKind::normal_ls;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ScenarioSpec{};
  s.n = 3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ScenarioSpec{};
  s.replications = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ScenarioSpec{};
  s.dgp = ResponseFunction::identity();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  DicSelectionSpec d;
  d.thresholds = {};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("binomial half-width") {
  CHECK(binomial_half_width(0.8, 6150) <= 0.01);
  CHECK(binomial_half_width(0.5, 100) == Approx(0.0979981992270027));
  CHECK(binomial_half_width(1.0, 10) == 0.0);
}

TEST_CASE("replications land at their index") {
  for (int threads : {1, 3}) {
    const auto recs = run_replications(10, threads, [](int i) {
      ReplicationRecord r;
      r.index = i;
      r.values.push_back({"sq", double(i * i)});
      return r;
    });
    REQUIRE(recs.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(recs[i].value("sq") == i * i);
  }
}

namespace {

ScenarioSpec small_scenario() {
  ScenarioSpec s;
  s.n = 200;
  s.replications = 4;
  s.chain = ChainSettings{600, 100, 1, 1, true};
  s.seed = 42;
  return s;
}

}  // namespace

TEST_CASE("coverage study") {
  ScenarioSpec one = small_scenario();
  one.replications = 1;
  const ExperimentReport r1 = run_coverage_study(one);
  CHECK(r1.effective + r1.divergent == 1);
  CHECK(r1.coefficients.size() == 4);

  const ExperimentReport a = run_coverage_study(small_scenario(), 1);
  const ExperimentReport b = run_coverage_study(small_scenario(), 2);
  REQUIRE(a.coefficients.size() == 4);
  CHECK(a.coefficients[0].name == "(Intercept)");
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(a.coefficients[k].bias == b.coefficients[k].bias);
    CHECK(a.coefficients[k].coverage95 == b.coefficients[k].coverage95);
    CHECK(a.coefficients[k].coverage80 <= a.coefficients[k].coverage95);
    CHECK(std::abs(a.coefficients[k].bias) < 1.0);
  }
  CHECK(a.records[2].seed == derive_seed(42, 2));
  std::stringstream js;
  write_report_json(js, a);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["study"] == "coverage");
  CHECK(j["records"].size() == 4);
  std::stringstream cs;
  write_report_csv(cs, a);
  std::string header;
  std::getline(cs, header);
  CHECK(header.rfind("index,seed,diverged", 0) == 0);
}

TEST_CASE("DIC selection rates are monotone in the threshold") {
  DicSelectionSpec d;
  d.scenario = small_scenario();
  const ExperimentReport r = run_dic_selection_study(d);
  REQUIRE(r.selection.size() == 4);
  for (std::size_t i = 1; i < r.selection.size(); ++i) CHECK(r.selection[i].rate <= r.selection[i - 1].rate);
  for (const ReplicationRecord& rec : r.records) {
    if (rec.diverged) continue;
    CHECK(rec.value("dic_difference") == Approx(rec.value("dic_wrong") - rec.value("dic_correct")));
  }
}

TEST_CASE("GPD tail simulation") {
  GpdTailSpec g;
  g.n = 5000;
  Rng rng(3);
  const DataBlock d = simulate_gpd_dataset(g, ResponseFunction::softplus(1.0), g.gamma_coefficients, rng);
  CHECK(d.y().minCoeff() >= 0.0);
  const ModelSpec m = gpd_tail_model(ResponseFunction::softplus(1.0));
  const Coefficients truth{{"sigma", g.sigma_coefficients}, {"gamma", g.gamma_coefficients}};
  const Eigen::MatrixXd theta = predict(m, truth, d, {});
  CHECK(theta.col(1).minCoeff() > 0.17);
  CHECK(theta.col(1).maxCoeff() < 0.88);
  CHECK(gpd_tail_model(ResponseFunction::exponential(), false).predictors()[1].size() == 1);

  // Fitting the generating model recovers the shape intercept.
  const MleResult fit = fit_mle(BoundModel(m, d));
  CHECK(std::abs(fit.coefficients[1].beta[0] - g.gamma_coefficients[0]) < 4.0 * fit.standard_errors()[1][0]);
}

TEST_CASE("GPD tail study smoke run") {
  GpdTailSpec g;
  g.n = 300;
  g.replications = 1;
  g.chain = ChainSettings{400, 100, 1, 1, true};
  const ExperimentReport r = run_gpd_tail_study(g);
  CHECK(r.records.size() == 1);
  CHECK(r.metrics.count("median_ratio_top") == 1);
  CHECK(r.metrics.count("share_null_dic_worse") == 1);
}
