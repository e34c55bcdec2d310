#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "spreg/experiments.hpp"
#include "spreg/mle.hpp"
#include "spreg/softplus.hpp"

using namespace spreg;
using namespace spreg::testing;
using doctest::Approx;

namespace {

DataBlock counts(std::vector<double> y) {
  const auto n = static_cast<Eigen::Index>(y.size());
  return DataBlock(Eigen::Map<Eigen::VectorXd>(y.data(), n), {}, Eigen::MatrixXd(n, 0));
}

ModelSpec intercept_poisson(ResponseFunction h) {
  return ModelSpec(FamilySpec::poisson(h), {PredictorSpec{"lambda", true, {}}});
}

}  // namespace

TEST_CASE("intercept-only poisson has the closed-form optimum") {
  const DataBlock d = counts({0, 3, 1, 4, 2, 2, 5, 1});
  const double ybar = 18.0 / 8.0;
  // A sharp softplus is the identity on positive intercepts.
  const MleResult id = fit_mle(BoundModel(intercept_poisson(ResponseFunction::softplus(100.0)), d));
  CHECK(id.converged);
  CHECK(std::abs(id.coefficients[0].beta[0] - ybar) < 1e-8);
  for (double a : {0.5, 1.0, 5.0}) {
    const MleResult sp = fit_mle(BoundModel(intercept_poisson(ResponseFunction::softplus(a)), d));
    CHECK(sp.converged);
    CHECK(sp.coefficients[0].beta[0] == Approx(softplus_inv(SoftplusParams(a), ybar)).epsilon(1e-8));
  }
  const MleResult ex = fit_mle(BoundModel(intercept_poisson(ResponseFunction::exponential()), d));
  const MleResult sp = fit_mle(BoundModel(intercept_poisson(ResponseFunction::softplus(2.0)), d));
  CHECK(std::exp(ex.coefficients[0].beta[0]) ==
        Approx(softplus(SoftplusParams(2.0), sp.coefficients[0].beta[0])).epsilon(1e-4));
}

TEST_CASE("intercept-only fits agree across responses on other families") {
  const ModelCase mc = make_case(FamilyKind::negbin, NbVariance::quadratic,
                                 {ResponseFunction::exponential(), ResponseFunction::exponential()});
  const DataBlock d = simulate(mc.model, mc.truth, 400, 8);
  auto fit = [&](ResponseFunction h) {
    const ModelSpec m(FamilySpec::negbin(h), {PredictorSpec{"mu", true, {}}, PredictorSpec{"theta", true, {}}});
    const MleResult r = fit_mle(BoundModel(m, d));
    CHECK(r.converged);
    return h.value(r.coefficients[0].beta[0]);
  };
  CHECK(fit(ResponseFunction::exponential()) == Approx(fit(ResponseFunction::softplus(3.0))).epsilon(1e-4));
  CHECK(fit(ResponseFunction::exponential()) == Approx(d.y().mean()).epsilon(1e-5));
}

TEST_CASE("initial values") {
  CHECK(init_coefficients(BoundModel(intercept_poisson(ResponseFunction::softplus(10.0)), counts({9, 8, 10, 9})))[0]
            .beta[0] == Approx(9.0).epsilon(1e-6));
  const Coefficients zero = init_coefficients(BoundModel(intercept_poisson(ResponseFunction::softplus(1.0)), counts({0, 0, 0})));
  CHECK(zero[0].beta[0] == Approx(softplus_inv(SoftplusParams(1.0), 1e-3)).epsilon(1e-12));
  const ModelSpec nl(FamilySpec::normal_ls(ResponseFunction::identity(), ResponseFunction::exponential()),
                     {PredictorSpec{"mu", true, {}}, PredictorSpec{"sigma", true, {}}});
  const Coefficients c = init_coefficients(BoundModel(nl, counts({1.0, 2.0, 4.5})));
  CHECK(c[0].beta[0] == Approx(2.5).epsilon(1e-14));
}

TEST_CASE("scenario DGP is recovered within three standard errors") {
  ScenarioSpec sc;
  sc.n = 5000;
  Rng rng(2024);
  const DataBlock d = simulate_dataset(sc, rng);
  const MleResult r = fit_mle(BoundModel(scenario_model(sc, sc.dgp), d));
  CHECK(r.converged);
  const Eigen::VectorXd se = r.standard_errors()[0];
  for (Eigen::Index j = 0; j < 4; ++j) {
    CAPTURE(j);
    CHECK(std::abs(r.coefficients[0].beta[j] - sc.coefficients[j]) < 3.0 * se[j]);
  }
}

TEST_CASE("likelihood trace is nondecreasing and the optimum is stationary") {
  for (const ModelCase& mc : model_grid()) {
    CAPTURE(mc.label);
    const DataBlock d = simulate(mc.model, mc.truth, 300, 17);
    const BoundModel bm(mc.model, d);
    const MleResult r = fit_mle(bm);
    CHECK(r.converged);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i] >= r.trace[i - 1] - 1e-10 * (1.0 + std::abs(r.trace[i - 1])));
    }
    CHECK(r.gradient_norm < 1e-6);
    for (std::size_t k = 0; k < bm.blocks(); ++k) {
      CHECK(fd_gradient(bm, r.coefficients, k).cwiseAbs().maxCoeff() < 1e-4);
      CHECK(r.information[k].isApprox(r.information[k].transpose(), 0.0));
    }
  }
}
