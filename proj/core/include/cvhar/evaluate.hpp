#pragma once

// Forecast loss measures, Diebold-Mariano and conditional predictive
// ability tests, and the fixed / increasing / rolling window backtests that
// pit the linear HAR against the C-vine conditional expectation.

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvhar/copulas.hpp"
#include "cvhar/har.hpp"
#include "cvhar/margins.hpp"
#include "cvhar/realized.hpp"
#include "cvhar/vine.hpp"

namespace cvhar::eval {

struct LossMeasures {
  double mse = 0.0;
  double mae = 0.0;
  double mad = 0.0;  // median absolute error
  double mase = 0.0;
  double mape = 0.0;
  double mda = 0.0;
  double qlik = 0.0;
  std::size_t n = 0;
  // Days left out of QLIK because the forecast was not positive.
  std::size_t qlik_excluded = 0;
};

/// Measures over one series. `y_prev` holds y_{t-1} for every t; when empty
/// the lag is taken inside the series and MDA runs over t = 2..T.
/// Throws for length mismatch, T < 2 or non-positive y.
LossMeasures loss_measures(std::span<const double> y, std::span<const double> yhat,
                           std::span<const double> y_prev = {});

/// Pools MSE/MAE/MAD/MAPE/QLIK over every instrument's residuals; MASE and
/// MDA are the averages of the per-instrument values.
struct SeriesView {
  std::span<const double> y;
  std::span<const double> yhat;
  std::span<const double> y_prev;
};
LossMeasures pooled_measures(std::span<const SeriesView> series);

enum class LossKind { squared, absolute, qlik };
std::string_view to_string(LossKind kind);

/// Per-observation loss; qlik requires yhat > 0.
double loss(LossKind kind, double y, double yhat);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// d_t = loss_a - loss_b; statistic mean(d) / sqrt(var(d)/n) with a
/// Newey-West long-run variance when `lags` > 0. Two-sided normal p-value.
TestResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b, int lags = 0);

/// Conditional predictive ability test with instruments (1, d_{t-1}):
/// n Zbar' Omega^{-1} Zbar against chi-squared(2).
TestResult cpa_test(std::span<const double> loss_a, std::span<const double> loss_b);

/// "", "*", "**" or "***" at 5%, 1%, 0.1%.
std::string_view significance_stars(double p_value);

enum class Scheme { FW, IW, RW };
std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view text);

struct SchemeConfig {
  Scheme scheme = Scheme::RW;
  std::size_t window = 500;
  margins::MarginKind margin = margins::MarginKind::ecdf;
  copula::FamilySet family_set = copula::FamilySet::AGT;
  margins::MarginOptions margin_options{};
  copula::FitOptions copula_options{};
  vine::ExpectationOptions expectation{};
  har::HarOptions har_options{};
  int dm_lags = 0;
  // Permit windows outside {250, 500, 750, 1250} (FW) / {250, 500, 750}.
  bool allow_any_window = false;
};

/// Throws ConfigError for an invalid combination.
void validate(const SchemeConfig& cfg);

struct ForecastRecord {
  std::chrono::year_month_day date;  // forecast origin; y is the next day's RK
  double y = 0.0;
  double y_prev = 0.0;  // rk_d at the origin
  double yhat_har = 0.0;
  double yhat_cvhar = 0.0;
  bool har_negative = false;
  bool in_sample = false;
  Scheme scheme = Scheme::RW;
  std::size_t window = 0;
};

struct TestRow {
  LossKind loss = LossKind::squared;
  std::optional<TestResult> dm;
  std::optional<TestResult> cpa;
};

struct Panel {
  LossMeasures har;
  LossMeasures cvhar;
  LossMeasures ratio;  // cvhar / har for every measure
};

struct EvalReport {
  Scheme scheme = Scheme::RW;
  std::size_t window = 0;
  std::string margin;
  std::string family_set;
  std::optional<Panel> in_sample;  // FW only
  Panel out_of_sample;
  std::vector<TestRow> tests;
  std::size_t har_negative_forecasts = 0;
  double last_vine_loglik = 0.0;
};

struct SchemeResult {
  std::vector<ForecastRecord> records;
  EvalReport report;
  vine::CVineModel last_vine;
  har::HarModel last_har;
};

struct FittedModels {
  har::HarModel har;
  margins::ComponentMargins margins;
  vine::CVineModel vine;
};

/// HAR by OLS, margins on the window, PIT, then the C-vine.
FittedModels fit_models(std::span<const realized::ComponentRow> window, const SchemeConfig& cfg);

/// Builds the ratio measures cvhar / har.
LossMeasures ratio_of(const LossMeasures& cvhar, const LossMeasures& har);

/// Fits both models on each estimation window and forecasts the next row.
/// FW: one fit on rows [0, W); IW: rows [0, d); RW: rows [d-W, d); the
/// forecast origins are d = W .. N-1.
SchemeResult run_scheme(std::span<const realized::ComponentRow> series, const SchemeConfig& cfg);

/// Measures and tests from a record list (one instrument).
EvalReport evaluate_records(std::span<const ForecastRecord> records, Scheme scheme, std::size_t window,
                            int dm_lags = 0);

/// Cross-instrument report: pooled / averaged measures per the aggregation
/// rule; tests on the stacked loss differentials.
EvalReport aggregate_reports(std::span<const std::vector<ForecastRecord>> per_instrument, Scheme scheme,
                             std::size_t window, int dm_lags = 0);

}  // namespace cvhar::eval
