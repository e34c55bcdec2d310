#include "spreg/softplus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spreg/errors.hpp"

namespace spreg {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_not_nan(double x, const char* op) {
  if (std::isnan(x)) throw DomainError(std::string(op) + ": NaN argument");
}

}  // namespace

SoftplusParams::SoftplusParams(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("softplus parameter a must be finite and > 0, got " + std::to_string(a));
  }
}

double softplus(SoftplusParams p, double x) {
  require_not_nan(x, "softplus");
  const double a = p.a();
  return std::max(0.0, x) + std::log1p(std::exp(-std::abs(a * x))) / a;
}

double softplus_inv(SoftplusParams p, double y) {
  if (!(y > 0.0)) throw DomainError("softplus_inv: argument must be > 0, got " + std::to_string(y));
  const double a = p.a();
  const double ay = a * y;
  if (ay > kLn2) return y + std::log1p(-std::exp(-ay)) / a;
  return std::log(std::expm1(ay)) / a;
}

double softplus_d1(SoftplusParams p, double x) {
  require_not_nan(x, "softplus_d1");
  const double ax = p.a() * x;
  if (ax >= 0.0) return 1.0 / (1.0 + std::exp(-ax));
  const double e = std::exp(ax);
  return e / (1.0 + e);
}

double softplus_d2(SoftplusParams p, double x) {
  require_not_nan(x, "softplus_d2");
  // s(1-s) with both factors taken from the side that does not cancel.
  const double e = std::exp(-std::abs(p.a() * x));
  const double big = 1.0 / (1.0 + e);
  const double small = e / (1.0 + e);
  return p.a() * big * small;
}

double rect_gap(SoftplusParams p, double x) {
  require_not_nan(x, "rect_gap");
  return std::log1p(std::exp(-std::abs(p.a() * x))) / p.a();
}

double rerr(SoftplusParams p, double x1, double x2) {
  require_not_nan(x1, "rerr");
  require_not_nan(x2, "rerr");
  if (x1 == x2) throw DomainError("rerr: x1 and x2 coincide");
  const double dx = x2 - x1;
  // softplus = relu + gap; splitting keeps the linear region free of cancellation.
  const double relu_slope = (std::max(0.0, x2) - std::max(0.0, x1)) / dx;
  const double gap_slope = (rect_gap(p, x2) - rect_gap(p, x1)) / dx;
  return 1.0 - relu_slope - gap_slope;
}

LinearityQuery::LinearityQuery(SoftplusParams p, double gamma, double alpha)
    : params_(p), gamma_(gamma), alpha_(alpha) {
  if (!std::isfinite(gamma) || gamma == 0.0) throw DomainError("LinearityQuery: gamma must be finite and nonzero");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("LinearityQuery: alpha must lie in (0, 1)");
}

double linear_threshold(const LinearityQuery& q) {
  const SoftplusParams p = q.params();
  const double gamma = q.gamma();
  const double alpha = q.alpha();
  auto above = [&](double t) { return rerr(p, t, t + gamma) > alpha; };

  double lo = -10.0 / p.a() - std::abs(gamma);
  double hi = 50.0 / p.a() + std::abs(gamma);
  double width = hi - lo;
  while (!above(lo)) {
    width *= 2.0;
    lo -= width;
  }
  width = hi - lo;
  while (above(hi)) {
    width *= 2.0;
    hi += width;
  }
  while (hi - lo >= 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double lse2(double x, double y) {
  const double m = std::max(x, y);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

}  // namespace spreg
