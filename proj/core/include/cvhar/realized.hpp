#pragma once

// Daily realized variance, Parzen realized kernel with automatic bandwidth,
// and construction of the daily/weekly/monthly component series.

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "cvhar/ingest.hpp"

namespace cvhar::realized {

struct RkEstimate {
  std::chrono::year_month_day date;
  double rk = 0.0;  // daily variance units
  int bandwidth = 0;
  std::size_t n_returns = 0;
};

/// One row of the regressor/target table: rk_w and rk_m are the trailing
/// 5- and 22-day means ending at `date`; target is the next day's RK.
struct ComponentRow {
  std::chrono::year_month_day date;
  double rk_d = 0.0;
  double rk_w = 0.0;
  double rk_m = 0.0;
  double target = 0.0;
};

using RkComponentSeries = std::vector<ComponentRow>;

inline constexpr std::size_t kWeeklyWindow = 5;
inline constexpr std::size_t kMonthlyWindow = 22;

/// Sum of squared consecutive differences of a log-price grid.
double realized_variance(std::span<const double> log_prices);

/// Parzen weight: 1 - 6x^2 + 6x^3 on [0, 1/2], 2(1-x)^3 on (1/2, 1].
double parzen_weight(double x);

/// Realized autocovariance sum_{j=h+1}^{n} r_j r_{j-h}.
double realized_autocovariance(std::span<const double> returns, std::size_t lag);

/// Non-flat-top Parzen realized kernel on a log-price grid. `jitter` prices
/// are averaged at each end point; jitter = 1 uses the raw end prices.
double realized_kernel(std::span<const double> log_prices, int bandwidth, int jitter = 1);

/// Kernel constant c* = ((k''(0))^2 / k^{0,0})^{1/5} for Parzen.
inline constexpr double kParzenBandwidthConstant = 3.5134;

/// H* = ceil(c* xi^{4/5} n^{3/5}).
int optimal_bandwidth(std::size_t n_returns, double xi_squared);

struct BandwidthConfig {
  std::chrono::minutes sparse_interval{20};
  std::chrono::seconds sparse_offset_step{60};
  std::size_t min_ticks = 10;
  int jitter = 1;
};

struct BandwidthEstimate {
  double noise_variance = 0.0;       // omega^2
  double integrated_variance = 0.0;  // sparse-grid RV
  double xi_squared = 0.0;
  std::size_t n_returns = 0;
  int bandwidth = 0;
};

/// Noise variance from the excess of tick-by-tick RV over subsampled
/// sparse-grid RV, divided by 2n; signal from the sparse RV itself.
BandwidthEstimate select_bandwidth(const ingest::DaySession& session, const BandwidthConfig& cfg = {});

RkEstimate realized_kernel(const ingest::DaySession& session, int bandwidth, int jitter = 1);

/// Bandwidth selection followed by the kernel estimate for one day.
RkEstimate estimate_day(const ingest::DaySession& session, const BandwidthConfig& cfg = {});

/// Estimates every sufficient session; insufficient days are skipped.
std::vector<RkEstimate> estimate_days(std::span<const ingest::DaySession> sessions,
                                      const BandwidthConfig& cfg = {});

/// Aligns the daily series into (rk_d, rk_w, rk_m, target) rows, dropping
/// the 21-day burn-in and the last day (no target). Needs >= 23 days.
RkComponentSeries build_components(std::span<const RkEstimate> rk_series);
RkComponentSeries build_components(std::span<const double> rk,
                                   std::span<const std::chrono::year_month_day> dates);

}  // namespace cvhar::realized
