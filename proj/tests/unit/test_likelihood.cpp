#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "spreg/errors.hpp"
#include "spreg/likelihood.hpp"

using namespace spreg;
using namespace spreg::testing;
using doctest::Approx;

TEST_CASE("poisson intercept score at beta = 0 under softplus(1)") {
  const Eigen::VectorXd y = (Eigen::VectorXd(4) << 0, 1, 3, 2).finished();
  const DataBlock d(y, {}, Eigen::MatrixXd(4, 0));
  const ModelSpec m(FamilySpec::poisson(ResponseFunction::softplus(1.0)), {PredictorSpec{"lambda", true, {}}});
  const BoundModel bm(m, d);
  const ScoreInfo si = score_and_info(bm, bm.zero_coefficients(), 0);
  double expected = 0.0;
  for (double v : y) expected += (v / std::numbers::ln2 - 1.0) * 0.5;
  CHECK(si.gradient[0] == Approx(expected).epsilon(1e-14));
  // Expected information: n h'^2 / lambda.
  CHECK(si.information(0, 0) == Approx(4 * 0.25 / std::numbers::ln2).epsilon(1e-14));
  CHECK(si.positive_definite);
}

TEST_CASE("score and observed information match finite differences on every model") {
  for (const ModelCase& mc : model_grid()) {
    CAPTURE(mc.label);
    const DataBlock d = simulate(mc.model, mc.truth, 20, 5);
    const BoundModel bm(mc.model, d);
    const Coefficients at = jitter(mc.truth, 0.05, 6);
    for (std::size_t k = 0; k < bm.blocks(); ++k) {
      CAPTURE(k);
      ScoreOptions obs;
      obs.kind = InfoKind::observed;
      const ScoreInfo si = score_and_info(bm, at, k, obs);
      CHECK(rel_error(si.gradient, fd_gradient(bm, at, k)) < 1e-5);
      CHECK(rel_error(si.information, fd_information(bm, at, k)) < 1e-4);
      CHECK(si.information.isApprox(si.information.transpose(), 0.0));
      CHECK(si.log_likelihood == log_likelihood(bm, at));
    }
  }
}

TEST_CASE("priors enter gradient and information") {
  const ModelCase mc = make_case(FamilyKind::poisson, NbVariance::quadratic, {ResponseFunction::softplus(1.0)});
  const DataBlock d = simulate(mc.model, mc.truth, 30, 3);
  const ModelSpec withp(mc.model.family(), mc.model.predictors(), {PriorSpec::normal(0.5)});
  const BoundModel flat(mc.model, d), prior(withp, d);
  const ScoreInfo a = score_and_info(flat, mc.truth, 0);
  const ScoreInfo b = score_and_info(prior, mc.truth, 0);
  CHECK(rel_error(b.gradient - a.gradient, -mc.truth[0].beta / 0.25) < 1e-12);
  CHECK(rel_error(b.information - a.information, Eigen::MatrixXd::Identity(3, 3) * 4.0) < 1e-12);
  CHECK(rel_error(b.gradient, fd_gradient(prior, mc.truth, 0)) < 1e-6);
  ScoreOptions no_prior;
  no_prior.include_prior = false;
  CHECK(rel_error(score_and_info(prior, mc.truth, 0, no_prior).gradient, a.gradient) < 1e-15);
}

TEST_CASE("non-finite contributions name the row") {
  Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 2.0);
  const DataBlock d(y, {"x"}, (Eigen::MatrixXd(5, 1) << 0, 0, 0, 800, 0).finished());
  const ModelSpec m(FamilySpec::poisson(ResponseFunction::exponential()), {PredictorSpec{"lambda", true, {"x"}}});
  const BoundModel bm(m, d);
  Coefficients c = bm.zero_coefficients();
  c[0].beta[1] = 1.0;
  try {
    score_and_info(bm, c, 0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.row() == 3);
  }
  CHECK(log_likelihood(bm, c) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("ridge repair") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  const double ridge = regularized_cholesky(a, 60, llt);
  CHECK(ridge > 0.0);
  CHECK(llt.info() == Eigen::Success);
  CHECK(regularized_cholesky(Eigen::MatrixXd::Identity(3, 3), 60, llt) == 0.0);
  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
  CHECK(regularized_cholesky(neg, 3, llt) < 0.0);
}
