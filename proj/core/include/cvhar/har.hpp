#pragma once

// Linear HAR baseline: target ~ 1 + rk_d + rk_w + rk_m by OLS.

#include <cstddef>
#include <span>
#include <vector>

#include "cvhar/realized.hpp"

namespace cvhar::har {

struct HarModel {
  double c = 0.0;
  double beta_d = 0.0;
  double beta_w = 0.0;
  double beta_m = 0.0;
  double residual_variance = 0.0;  // SSR / (n - 4)
  std::size_t n_obs = 0;
};

struct HarOptions {
  std::size_t min_obs = 30;
};

/// Householder QR with column pivoting; throws on a rank-deficient design.
HarModel fit_har(std::span<const realized::ComponentRow> window, const HarOptions& opts = {});

struct HarForecast {
  double value = 0.0;
  bool negative = false;
};

HarForecast har_forecast(const HarModel& model, double x_d, double x_w, double x_m);

/// In-sample fitted values on the rows of `window`.
std::vector<double> fitted_values(const HarModel& model, std::span<const realized::ComponentRow> window);

}  // namespace cvhar::har
