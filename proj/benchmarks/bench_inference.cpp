#include <benchmark/benchmark.h>

#include "spreg/likelihood.hpp"
#include "spreg/mcmc.hpp"
#include "spreg/model.hpp"

namespace {

// Poisson softplus(1) regression on three U(-1, 1) covariates.
spreg::BoundModel poisson_model(Eigen::Index n) {
  spreg::Rng rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  const spreg::SoftplusParams p(1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = u(rng);
    const double eta = 1.0 + 0.5 * x(i, 0) + x(i, 1) + 2.0 * x(i, 2);
    y[i] = static_cast<double>(std::poisson_distribution<int>(spreg::softplus(p, eta))(rng));
  }
  spreg::ModelSpec m(spreg::FamilySpec::poisson(spreg::ResponseFunction::softplus(1.0)),
                     {spreg::PredictorSpec{"lambda", true, {"x1", "x2", "x3"}}});
  return spreg::BoundModel(std::move(m), spreg::DataBlock(y, {"x1", "x2", "x3"}, x));
}

spreg::Coefficients truth() { return {{"lambda", (Eigen::VectorXd(4) << 1.0, 0.5, 1.0, 2.0).finished()}}; }

void BM_ScoreAndInfo(benchmark::State& state) {
  const spreg::BoundModel bm = poisson_model(state.range(0));
  const spreg::Coefficients c = truth();
  for (auto _ : state) benchmark::DoNotOptimize(spreg::score_and_info(bm, c, 0).gradient);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreAndInfo)->Arg(1000)->Arg(5000);

void BM_MhStep(benchmark::State& state) {
  const spreg::BoundModel bm = poisson_model(state.range(0));
  spreg::Coefficients c = truth();
  spreg::ProposalState s = spreg::make_proposal_state(bm, c, 0);
  spreg::Rng rng(9);
  for (auto _ : state) {
    spreg::MhStep step = spreg::mh_iwls_step(bm, c, s, rng);
    c[0].beta = step.state.theta;
    s = std::move(step.state);
  }
}
BENCHMARK(BM_MhStep)->Arg(1000)->Arg(5000);

void BM_Chain(benchmark::State& state) {
  const spreg::BoundModel bm = poisson_model(1000);
  for (auto _ : state) benchmark::DoNotOptimize(spreg::run_chain(bm, spreg::ChainSettings{1200, 200, 1, 5, true}));
}
BENCHMARK(BM_Chain)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
