#include "cvhar/har.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "cvhar/error.hpp"

namespace cvhar::har {

HarModel fit_har(std::span<const realized::ComponentRow> window, const HarOptions& opts) {
  const std::size_t n = window.size();
  if (n < opts.min_obs || n < 5) {
    throw_domain("fit_har: need at least " + std::to_string(std::max<std::size_t>(opts.min_obs, 5)) +
                 " observations");
  }
  Eigen::MatrixXd X(n, 4);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = window[i];
    const auto k = static_cast<Eigen::Index>(i);
    X(k, 0) = 1.0;
    X(k, 1) = r.rk_d;
    X(k, 2) = r.rk_w;
    X(k, 3) = r.rk_m;
    y(k) = r.target;
  }
  if (!X.allFinite() || !y.allFinite()) throw_domain("fit_har: non-finite input");
  // unit column scale so the rank threshold does not depend on the RK units
  const Eigen::VectorXd scale = X.cwiseAbs().colwise().maxCoeff().transpose();
  if ((scale.array() <= 0.0).any()) throw_domain("fit_har: rank-deficient design matrix");
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  // constant regressors collapse onto the intercept
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) throw_domain("fit_har: rank-deficient design matrix");
  const Eigen::VectorXd beta = qr.solve(y).cwiseQuotient(scale);
  if (!beta.allFinite()) throw_domain("fit_har: non-finite coefficients");

  HarModel m;
  m.c = beta(0);
  m.beta_d = beta(1);
  m.beta_w = beta(2);
  m.beta_m = beta(3);
  m.n_obs = n;
  const Eigen::VectorXd resid = y - X * beta;
  m.residual_variance = n > 4 ? resid.squaredNorm() / static_cast<double>(n - 4) : 0.0;
  return m;
}

HarForecast har_forecast(const HarModel& model, double x_d, double x_w, double x_m) {
  HarForecast f;
  f.value = model.c + model.beta_d * x_d + model.beta_w * x_w + model.beta_m * x_m;
  f.negative = f.value < 0.0;
  return f;
}

std::vector<double> fitted_values(const HarModel& model, std::span<const realized::ComponentRow> window) {
  std::vector<double> out;
  out.reserve(window.size());
  for (const auto& r : window) out.push_back(har_forecast(model, r.rk_d, r.rk_w, r.rk_m).value);
  return out;
}

}  // namespace cvhar::har
