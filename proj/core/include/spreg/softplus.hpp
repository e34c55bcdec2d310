#pragma once

// Generalized softplus log(1 + exp(a x)) / a and the machinery around its
// approximately linear part.
//
// All kernels are written for 64-bit doubles. In 32-bit floats the naive form
// overflows once a*x exceeds ~89; the formulations here never evaluate exp()
// at a positive argument, so they are also safe in float, but only double is
// tested.

namespace spreg {

/// Sharpness parameter of the generalized softplus. Always finite and > 0.
class SoftplusParams {
 public:
  explicit SoftplusParams(double a);

  double a() const noexcept { return a_; }

  friend bool operator==(const SoftplusParams&, const SoftplusParams&) = default;

 private:
  double a_;
};

/// max(0, x) + log1p(exp(-|a x|)) / a.  Strictly positive for finite x.
double softplus(SoftplusParams p, double x);

/// Inverse of softplus on y > 0.
double softplus_inv(SoftplusParams p, double y);

/// First derivative, the logistic sigmoid 1 / (1 + exp(-a x)).
double softplus_d1(SoftplusParams p, double x);

/// Second derivative a s (1 - s) with s = softplus_d1(p, x). Peaks at a/4 for x = 0.
double softplus_d2(SoftplusParams p, double x);

/// softplus(x) - max(0, x), in (0, log(2)/a].
double rect_gap(SoftplusParams p, double x);

/// Relative error of reading a predictor change x1 -> x2 as the same change
/// on the parameter: 1 - (softplus(x2) - softplus(x1)) / (x2 - x1).
/// Symmetric in (x1, x2). Throws DomainError if x1 == x2.
double rerr(SoftplusParams p, double x1, double x2);

/// Query for the start of the approximately linear region.
class LinearityQuery {
 public:
  /// gamma: nonzero effect size on the predictor scale; alpha: acceptable relative error in (0, 1).
  LinearityQuery(SoftplusParams p, double gamma, double alpha = 0.05);

  SoftplusParams params() const noexcept { return params_; }
  double gamma() const noexcept { return gamma_; }
  double alpha() const noexcept { return alpha_; }

 private:
  SoftplusParams params_;
  double gamma_;
  double alpha_;
};

/// Smallest T with rerr(T, T + gamma) <= alpha, by bisection to 1e-8.
double linear_threshold(const LinearityQuery& q);

/// log(exp(x) + exp(y)) without overflow. Either argument may be -inf.
double lse2(double x, double y);

}  // namespace spreg
