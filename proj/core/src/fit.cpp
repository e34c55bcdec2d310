#include "spreg/fit.hpp"

#include "spreg/errors.hpp"

namespace spreg {

FitResult FitResult::from_mle(ModelSpec model, MleResult mle) {
  FitResult f{std::move(model), mle.coefficients, std::move(mle), std::nullopt};
  return f;
}

FitResult FitResult::from_chain(ModelSpec model, Chain chain) {
  Coefficients point = chain.posterior_mean();
  FitResult f{std::move(model), std::move(point), std::nullopt, std::move(chain)};
  return f;
}

Eigen::MatrixXd predict(const ModelSpec& model, const Coefficients& coefs, const DataBlock& newdata,
                        const PredictRequest& request) {
  const FamilySpec& f = model.family();
  if (coefs.size() != model.blocks()) throw DomainError("predict: coefficient blocks do not match the model");
  const Eigen::Index n = newdata.n();
  const auto k = static_cast<Eigen::Index>(model.blocks());
  Eigen::MatrixXd theta(n, k);
  for (std::size_t b = 0; b < model.blocks(); ++b) {
    const Eigen::VectorXd eta = linear_predictor(build_design(newdata, model.predictors()[b]), coefs[b]);
    const ResponseFunction& h = f.response(b);
    for (Eigen::Index i = 0; i < n; ++i) theta(i, static_cast<Eigen::Index>(b)) = h.value(eta[i]);
  }
  if (request.target == PredictTarget::parameters) return theta;

  Eigen::MatrixXd out(n, 1);
  double row[4];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) row[j] = theta(i, j);
    const std::span<const double> t(row, static_cast<std::size_t>(k));
    out(i, 0) = request.target == PredictTarget::mean ? mean(f, t) : quantile(f, request.p, t);
  }
  return out;
}

Eigen::MatrixXd predict(const FitResult& fit, const DataBlock& newdata, const PredictRequest& request) {
  return predict(fit.model, fit.point, newdata, request);
}

}  // namespace spreg
