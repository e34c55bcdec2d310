#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "spreg/diagnostics.hpp"
#include "spreg/errors.hpp"
#include "spreg/stats.hpp"

using namespace spreg;
using namespace spreg::testing;
using doctest::Approx;

namespace {

std::vector<double> perfect(int n) {
  std::vector<double> z;
  for (int i = 1; i <= n; ++i) z.push_back(std_normal_quantile((i - 0.5) / n));
  return z;
}

double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

ModelCase poisson_case() { return make_case(FamilyKind::poisson, NbVariance::quadratic, {ResponseFunction::softplus(1.0)}); }
ModelCase normal_case() {
  return make_case(FamilyKind::normal_ls, NbVariance::quadratic,
                   {ResponseFunction::identity(), ResponseFunction::exponential()});
}

}  // namespace

TEST_CASE("continuous residual at the conditional median is zero") {
  const ModelCase mc = normal_case();
  DataBlock d = simulate(mc.model, mc.truth, 5, 1);
  const Eigen::MatrixXd med = predict(mc.model, mc.truth, d, {PredictTarget::quantile, 0.5});
  const DataBlock at_median(med.col(0), d.names(), d.covariates());
  for (double r : rqr(mc.model, mc.truth, at_median, 3).residuals) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("residuals of correctly specified models are standard normal") {
  for (const ModelCase& mc : {poisson_case(), normal_case()}) {
    for (Eigen::Index n : {500, 2000}) {
      const DataBlock d = simulate(mc.model, mc.truth, n, 100 + n);
      const RqrSet r = rqr(mc.model, mc.truth, d, 7);
      CHECK(r.residuals.size() == static_cast<std::size_t>(n));
      CHECK(r.seed == 7);
      const double ks = ks_distance_std_normal(r.residuals);
      CHECK(ks < 1.5 * 1.36 / std::sqrt(double(n)));
      if (n == 2000) CHECK(ks < 0.05);
    }
  }
}

TEST_CASE("zero counts randomize uniformly below F(0)") {
  const ModelSpec m(FamilySpec::poisson(ResponseFunction::exponential()), {PredictorSpec{"lambda", true, {}}});
  const Coefficients c{{"lambda", Eigen::VectorXd::Constant(1, std::log(0.2))}};
  const DataBlock d(Eigen::VectorXd::Zero(4000), {}, Eigen::MatrixXd(4000, 0));
  const double f0 = std::exp(-0.2);
  std::vector<double> u;
  for (double r : rqr(m, c, d, 99).residuals) u.push_back(std_normal_cdf(r) / f0);
  CHECK(*std::max_element(u.begin(), u.end()) <= 1.0 + 1e-12);
  CHECK(ks_uniform(u) < 1.36 / std::sqrt(4000.0));
  // Different seeds give different randomizations.
  CHECK(rqr(m, c, d, 1).residuals != rqr(m, c, d, 2).residuals);
}

TEST_CASE("residuals are clipped") {
  const ModelSpec m(FamilySpec::normal_ls(ResponseFunction::identity(), ResponseFunction::exponential()),
                    {PredictorSpec{"mu", true, {}}, PredictorSpec{"sigma", true, {}}});
  const Coefficients c{{"mu", Eigen::VectorXd::Zero(1)}, {"sigma", Eigen::VectorXd::Zero(1)}};
  const DataBlock d((Eigen::VectorXd(2) << -100.0, 100.0).finished(), {}, Eigen::MatrixXd(2, 0));
  const RqrSet r = rqr(m, c, d, 0);
  CHECK(r.residuals[0] == Approx(std_normal_quantile(kRqrClip)).epsilon(1e-14));
  // 1 - clip is rounded in double precision, which moves the upper bound by ~1e-5.
  CHECK(std::abs(r.residuals[1] + std_normal_quantile(kRqrClip)) < 1e-4);
  CHECK(std::isfinite(ad_statistic(r).a2));
}

TEST_CASE("Anderson-Darling statistic") {
  // 50-digit evaluations of the defining sum.
  CHECK(ad_statistic(perfect(100)).a2 == Approx(0.011495132744090158809).epsilon(1e-10));
  CHECK(ad_statistic(perfect(100)).a2 < 0.05);
  CHECK(ad_statistic(std::vector<double>{-1.0, 1.0}).a2 == Approx(0.35928298207961317435).epsilon(1e-13));
  std::vector<double> shifted = perfect(100);
  for (double& z : shifted) z += 2.0;
  CHECK(ad_statistic(shifted).a2 > 50.0);
  std::vector<double> half = perfect(100);
  for (double& z : half) z += 0.5;
  CHECK(ad_statistic(perfect(100)).a2 < ad_statistic(half).a2);
  CHECK(ad_statistic(perfect(10)).n == 10);
  CHECK_THROWS_AS(ad_statistic(std::vector<double>{1.0}), DomainError);
}

TEST_CASE("QQ export") {
  const auto one = qq_export(std::vector<double>{1.7});
  REQUIRE(one.size() == 1);
  CHECK(one[0].theoretical == 0.0);
  CHECK(one[0].observed == 1.7);

  const std::vector<double> z{0.3, -1.2, 2.2, 0.0, -0.4, 1e-17};
  std::vector<double> zp(z.rbegin(), z.rend());
  const auto a = qq_export(z);
  const auto b = qq_export(zp);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].theoretical == b[i].theoretical);
    CHECK(a[i].observed == b[i].observed);
    if (i > 0) {
      CHECK(a[i].theoretical >= a[i - 1].theoretical);
      CHECK(a[i].observed >= a[i - 1].observed);
    }
  }
  std::stringstream ss;
  write_qq_csv(ss, a);
  CHECK(ss.str().rfind("theoretical,observed\n", 0) == 0);
  const auto back = read_qq_csv(ss);
  REQUIRE(back.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(back[i].theoretical - a[i].theoretical) <= 1e-12);
    CHECK(std::abs(back[i].observed - a[i].observed) <= 1e-12);
  }
  std::stringstream bad("x,y\n1,2\n");
  CHECK_THROWS_AS(read_qq_csv(bad), ConfigError);
  CHECK_THROWS_AS(qq_export(std::vector<double>{}), DomainError);
}

TEST_CASE("CI width ratios") {
  const ModelCase mc = make_case(FamilyKind::gpd, NbVariance::quadratic,
                                 {ResponseFunction::exponential(), ResponseFunction::softplus(1.0)});
  const DataBlock d = simulate(mc.model, mc.truth, 150, 4);
  const BoundModel bm(mc.model, d);
  const FitResult f = FitResult::from_chain(mc.model, run_chain(bm, ChainSettings{1200, 200, 2, 8}));
  const auto same = ci_width_ratio(f, f, d, 0.99);
  REQUIRE(same.size() == 150);
  for (const WidthRatio& r : same) {
    CHECK(r.ratio == 1.0);
    CHECK(r.width_a > 0.0);
    CHECK_FALSE(r.degenerate);
  }
  const FitResult one = FitResult::from_chain(mc.model, run_chain(bm, ChainSettings{10, 9, 1, 8}));
  for (const WidthRatio& r : ci_width_ratio(one, one, d, 0.99)) {
    CHECK(r.degenerate);
    CHECK(r.ratio == 1.0);
    CHECK(r.width_b == 0.0);
  }
  const FitResult mle = FitResult::from_mle(mc.model, fit_mle(bm));
  CHECK_THROWS_AS(ci_width_ratio(mle, f, d, 0.99), StateError);
  std::stringstream ss;
  write_ratio_csv(ss, same);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "obs_id,ratio");
}
