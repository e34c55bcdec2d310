// Acceptance checks. Prints one PASS/FAIL line per criterion.
// Usage: spreg_acceptance [criterion ...]   (default: all of 1..10)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "spreg/diagnostics.hpp"
#include "spreg/experiments.hpp"
#include "spreg/fit.hpp"
#include "spreg/io.hpp"
#include "spreg/mcmc.hpp"
#include "spreg/mle.hpp"
#include "spreg/softplus.hpp"
#include "spreg/stats.hpp"

using namespace spreg;
using namespace spreg::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome stability() {
  const SoftplusParams a10(10.0);
  const double v = softplus(a10, 9.0);
  const double delta = rect_gap(a10, 9.0);
  bool ok = v == 9.0 && delta > 0.0 && delta < 1e-39;
  long bad = 0;
  for (double a : {0.1, 1.0, 10.0, 100.0}) {
    const SoftplusParams p(a);
    double prev = -1.0;
    for (int i = -1000000; i <= 1000000; i += 5) {
      const double s = softplus(p, static_cast<double>(i) + 0.25);
      if (!std::isfinite(s) || s < prev) ++bad;
      prev = s;
    }
    if (!std::isfinite(softplus(p, 1e6))) ++bad;
  }
  ok = ok && bad == 0;
  return {ok, fmt("softplus_10(9) = %.17g, delta = %.6g, non-finite/non-monotone points: %ld", v, delta, bad)};
}

Outcome approximation_bound() {
  bool ok = true;
  std::string detail;
  for (double a : {0.5, 1.0, 5.0, 10.0}) {
    const SoftplusParams p(a);
    double best = -1.0, argmax = 0.0;
    for (int i = -50000; i <= 50000; ++i) {
      const double x = i / 1000.0;
      const double g = softplus(p, x) - std::max(0.0, x);
      if (g > best) {
        best = g;
        argmax = x;
      }
    }
    const double bound = std::log(2.0) / a;
    ok = ok && argmax == 0.0 && std::abs(best - bound) < 1e-12 && best <= bound + 1e-15;
    detail += fmt("a=%g max %.15g at x=%g (log2/a %.15g); ", a, best, argmax, bound);
  }
  return {ok, detail};
}

Outcome linearity_thresholds() {
  const double t1 = linear_threshold(LinearityQuery(SoftplusParams(5.0), 0.53, 0.05));
  const double t2 = linear_threshold(LinearityQuery(SoftplusParams(5.0), -0.54, 0.05));
  return {std::abs(t1 - 0.37) <= 0.01 && std::abs(t2 - 0.91) <= 0.01,
          fmt("T(a=5, 0.53) = %.6f (0.37 +/- 0.01), T(a=5, -0.54) = %.6f (0.91 +/- 0.01)", t1, t2)};
}

Outcome gradient_suite() {
  double worst = 0.0;
  std::string worst_label;
  int checked = 0;
  for (const ModelCase& mc : model_grid()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DataBlock d = simulate(mc.model, mc.truth, 20, derive_seed(seed, 0));
      const BoundModel bm(mc.model, d);
      const Coefficients at = jitter(mc.truth, 0.05, derive_seed(seed, 1));
      for (std::size_t k = 0; k < bm.blocks(); ++k) {
        const double e = rel_error(score_and_info(bm, at, k).gradient, fd_gradient(bm, at, k));
        ++checked;
        if (!(e <= worst)) {
          worst = e;
          worst_label = mc.label;
        }
      }
    }
  }
  return {worst < 1e-4, fmt("%zu models x 5 seeds, %d blocks; worst relative error %.3g (%s)", model_grid().size(),
                            checked, worst, worst_label.c_str())};
}

Outcome coverage() {
  ScenarioSpec s;  // softplus(1) Poisson, n = 1000, R = 200, 6000/1000
  s.seed = 20240501;
  const ExperimentReport r = run_coverage_study(s);
  bool ok = r.effective > 0;
  std::string detail = fmt("R=%d effective=%d; ", r.replications, r.effective);
  for (const CoefficientReport& c : r.coefficients) {
    ok = ok && c.coverage95 >= 0.92 && c.coverage95 <= 0.98 && c.coverage80 >= 0.74 && c.coverage80 <= 0.86 &&
         std::abs(c.bias) < 0.05;
    detail += fmt("%s: cov95 %.3f cov80 %.3f bias %+.4f; ", c.name.c_str(), c.coverage95, c.coverage80, c.bias);
  }
  return {ok, detail};
}

Outcome dic_selection() {
  std::vector<double> rates, half;
  std::string detail;
  for (int n : {200, 5000}) {
    DicSelectionSpec d;
    d.scenario.dgp = ResponseFunction::exponential();
    d.scenario.n = n;
    d.scenario.replications = 100;
    d.scenario.seed = 20240502;
    d.alternative = ResponseFunction::softplus(5.0);
    const ExperimentReport r = run_dic_selection_study(d);
    rates.push_back(r.selection.at(0).rate);
    half.push_back(r.selection.at(0).half_width);
    detail += fmt("n=%d: rate(t=0) %.3f +/- %.3f (effective %d); ", n, rates.back(), half.back(), r.effective);
  }
  return {rates[1] > rates[0] && rates[1] - half[1] > 0.8, detail};
}

Outcome crabs() {
  const std::filesystem::path file = std::filesystem::path(SPREG_SOURCE_DIR) / "data" / "horseshoe_crabs.csv";
  const DataBlock d = read_csv(file, DataSchema{"satellites", {"width", "color"}, {}});
  const auto model = [](ResponseFunction h) {
    return ModelSpec(FamilySpec::negbin(std::move(h), ResponseFunction::exponential(), NbVariance::linear),
                     {PredictorSpec{"mu", true, {"width", "color"}}, PredictorSpec{"theta", true, {}}});
  };
  const ChainSettings cs{12000, 2000, 1, 20240501, true};
  const BoundModel sp(model(ResponseFunction::softplus(5.0)), d);
  const BoundModel ex(model(ResponseFunction::exponential()), d);
  const Chain csp = run_chain(sp, cs);
  const Chain cex = run_chain(ex, cs);
  const double dic_sp = dic(csp, sp).dic;
  const double dic_ex = dic(cex, ex).dic;
  const Coefficients m = csp.posterior_mean();
  const double width = m[0].beta[1], color = m[0].beta[2];
  const Eigen::VectorXd eta = linear_predictor(sp.design(0), m[0]);
  const double share = (eta.array() > 0.37).cast<double>().mean();
  const bool ok = dic_sp < dic_ex && std::abs(width - 0.53) <= 0.10 && std::abs(color + 0.54) <= 0.20 && share > 0.98;
  return {ok, fmt("DIC softplus %.3f < exp %.3f; width %.4f (0.53 +/- 0.10), color %.4f (-0.54 +/- 0.20); "
                  "eta > 0.37 share %.4f",
                  dic_sp, dic_ex, width, color, share)};
}

Outcome dic_identity() {
  const ModelCase mc = make_case(FamilyKind::negbin, NbVariance::quadratic,
                                 {ResponseFunction::softplus(1.0), ResponseFunction::exponential()});
  const DataBlock d = simulate(mc.model, mc.truth, 200, 3);
  const BoundModel bm(mc.model, d);
  const Chain c = run_chain(bm, ChainSettings{1500, 500, 1, 11, true});
  // Independent evaluation of both deviance terms.
  double dbar = 0.0;
  for (std::size_t s = 0; s < c.size(); ++s) dbar += -2.0 * log_likelihood(bm, c.sample(s));
  dbar /= static_cast<double>(c.size());
  const double dhat = -2.0 * log_likelihood(bm, c.posterior_mean());
  const DicResult r = dic(c, bm);
  const double err = std::abs(r.dic - (2.0 * dbar - dhat));
  const bool identity_ok = err <= 1e-9 * std::abs(r.dic) && r.dic == 2.0 * r.mean_deviance - r.deviance_at_mean;

  const Chain one = run_chain(bm, ChainSettings{10, 9, 1, 11, true});
  const DicResult r1 = dic(one, bm);
  return {identity_ok && one.size() == 1 && r1.effective_parameters == 0.0,
          fmt("DIC %.10f vs 2*Dbar - D(mean) %.10f (diff %.3g); one-sample chain pD = %g", r.dic, 2.0 * dbar - dhat, err,
              r1.effective_parameters)};
}

Outcome rqr_calibration() {
  const ModelCase normal = make_case(FamilyKind::normal_ls, NbVariance::quadratic,
                                     {ResponseFunction::identity(), ResponseFunction::exponential()});
  const ModelCase pois = make_case(FamilyKind::poisson, NbVariance::quadratic, {ResponseFunction::softplus(1.0)});
  std::string detail;
  bool ok = true;
  for (const ModelCase* mc : {&normal, &pois}) {
    const DataBlock d = simulate(mc->model, mc->truth, 2000, 2024);
    const FitResult f = FitResult::from_mle(mc->model, fit_mle(BoundModel(mc->model, d)));
    const double ks = ks_distance_std_normal(rqr(f, d, 77).residuals);
    ok = ok && ks < 0.05;
    detail += fmt("%s KS %.4f; ", to_string(mc->model.family().kind()).c_str(), ks);
  }
  return {ok, detail};
}

Outcome gpd_tail() {
  GpdTailSpec g;  // n = 2000, R = 20
  g.seed = 20240503;
  const ExperimentReport r = run_gpd_tail_study(g);
  const double share = r.metrics.at("share_softplus_max_smaller");
  const double ratio = r.metrics.at("median_ratio_top");
  return {r.effective == g.replications && share >= 0.7 && ratio < 1.0,
          fmt("effective %d/%d; softplus max q99.9 smaller in %.2f of replications (>= 0.70); "
              "median top-decile CI-width ratio %.4f (< 1)",
              r.effective, g.replications, share, ratio)};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria{
    {1, {"stability", stability}},
    {2, {"approximation bound", approximation_bound}},
    {3, {"linearity thresholds", linearity_thresholds}},
    {4, {"gradient suite", gradient_suite}},
    {5, {"coverage study", coverage}},
    {6, {"DIC selection", dic_selection}},
    {7, {"horseshoe crab golden", crabs}},
    {8, {"DIC identity", dic_identity}},
    {9, {"RQR calibration", rqr_calibration}},
    {10, {"GPD tail study", gpd_tail}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (const auto& [k, v] : kCriteria) which.push_back(k);
  }
  int failed = 0;
  for (int k : which) {
    const auto it = kCriteria.find(k);
    if (it == kCriteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d (%s): %s [%.1fs] %s\n", k, it->second.first, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
