#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "spreg/fit.hpp"

namespace spreg {

inline constexpr double kRqrClip = 1e-12;

/// Randomized quantile residuals on the standard normal scale.
struct RqrSet {
  std::vector<double> residuals;
  std::uint64_t seed = 0;
  double clip = kRqrClip;  // probabilities were clipped to [clip, 1 - clip]
};

/// Continuous families: Phi^{-1}(F(y)). Count families: Phi^{-1}(u) with
/// u ~ U(F(y - 1), F(y)]. F uses the fit's plug-in point estimate.
RqrSet rqr(const FitResult& fit, const DataBlock& data, std::uint64_t seed);
/// Same with explicit coefficients.
RqrSet rqr(const ModelSpec& model, const Coefficients& coefs, const DataBlock& data, std::uint64_t seed);

struct AdStatistic {
  double a2 = 0.0;
  std::size_t n = 0;
};

/// Anderson-Darling A^2 against the standard normal.
AdStatistic ad_statistic(std::span<const double> z);
inline AdStatistic ad_statistic(const RqrSet& r) { return ad_statistic(r.residuals); }

struct QqRow {
  double theoretical;
  double observed;
};

/// (Phi^{-1}((i - 0.5) / n), z_(i)) pairs.
std::vector<QqRow> qq_export(std::span<const double> z);
inline std::vector<QqRow> qq_export(const RqrSet& r) { return qq_export(r.residuals); }

/// CSV with header `theoretical,observed`, full precision.
void write_qq_csv(std::ostream& os, const std::vector<QqRow>& rows);
std::vector<QqRow> read_qq_csv(std::istream& is);

struct WidthRatio {
  long obs_id = 0;
  double ratio = 1.0;
  double width_a = 0.0;
  double width_b = 0.0;
  double estimate_a = 0.0;  // plug-in quantile of fit A
  double estimate_b = 0.0;
  bool degenerate = false;  // width_b == 0; ratio set to 1
};

/// Per observation: the p-quantile of the response under every posterior draw,
/// equal-tailed `level` intervals, and width_a / width_b.
/// Both fits must carry chains. Throws StateError otherwise.
std::vector<WidthRatio> ci_width_ratio(const FitResult& a, const FitResult& b, const DataBlock& newdata, double p,
                                       double level = 0.95);

/// CSV with header `obs_id,ratio`.
void write_ratio_csv(std::ostream& os, const std::vector<WidthRatio>& rows);

}  // namespace spreg
