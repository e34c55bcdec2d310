#include <benchmark/benchmark.h>

#include <vector>

#include "spreg/random.hpp"
#include "spreg/softplus.hpp"

namespace {

std::vector<double> grid(std::size_t n) {
  spreg::Rng rng(1);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

void BM_Softplus(benchmark::State& state) {
  const spreg::SoftplusParams p(static_cast<double>(state.range(0)));
  const auto x = grid(4096);
  for (auto _ : state) {
    double acc = 0.0;
    for (double v : x) acc += spreg::softplus(p, v);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}
BENCHMARK(BM_Softplus)->Arg(1)->Arg(10);

void BM_SoftplusInverse(benchmark::State& state) {
  const spreg::SoftplusParams p(5.0);
  auto x = grid(4096);
  for (double& v : x) v = spreg::softplus(p, v);
  for (auto _ : state) {
    double acc = 0.0;
    for (double v : x) acc += spreg::softplus_inv(p, v);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}
BENCHMARK(BM_SoftplusInverse);

void BM_SoftplusDerivatives(benchmark::State& state) {
  const spreg::SoftplusParams p(5.0);
  const auto x = grid(4096);
  for (auto _ : state) {
    double acc = 0.0;
    for (double v : x) acc += spreg::softplus_d1(p, v) + spreg::softplus_d2(p, v);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}
BENCHMARK(BM_SoftplusDerivatives);

void BM_LinearThreshold(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(spreg::linear_threshold(spreg::LinearityQuery(spreg::SoftplusParams(5.0), 0.53, 0.05)));
  }
}
BENCHMARK(BM_LinearThreshold);

}  // namespace
