#include "cvhar/realized.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cvhar/error.hpp"

namespace cvhar::realized {

namespace {

std::vector<double> log_prices_of(const ingest::DaySession& session) {
  std::vector<double> out;
  out.reserve(session.ticks.size());
  for (const auto& t : session.ticks) {
    require(t.price > 0.0, "realized: non-positive price in session");
    out.push_back(std::log(t.price));
  }
  return out;
}

// Subsampled RV on a calendar-time grid using previous-tick prices,
// averaged over grid offsets.
double sparse_realized_variance(const ingest::DaySession& session, const BandwidthConfig& cfg) {
  const auto& ticks = session.ticks;
  const std::int64_t interval =
      std::chrono::duration_cast<std::chrono::nanoseconds>(cfg.sparse_interval).count();
  const std::int64_t step =
      std::max<std::int64_t>(1, std::chrono::duration_cast<std::chrono::nanoseconds>(cfg.sparse_offset_step).count());
  const std::int64_t first = ticks.front().timestamp;
  const std::int64_t last = ticks.back().timestamp;

  double total = 0.0;
  int used = 0;
  for (std::int64_t offset = 0; offset < interval; offset += step) {
    double prev = std::log(ticks.front().price);
    double rv = 0.0;
    int points = 0;
    std::size_t idx = 0;
    for (std::int64_t t = first + offset; t <= last; t += interval) {
      while (idx + 1 < ticks.size() && ticks[idx + 1].timestamp <= t) ++idx;
      const double x = std::log(ticks[idx].price);
      const double r = x - prev;
      rv += r * r;
      prev = x;
      ++points;
    }
    // close the grid at the last trade
    const double r = std::log(ticks.back().price) - prev;
    rv += r * r;
    if (points > 0) {
      total += rv;
      ++used;
    }
  }
  return used > 0 ? total / used : 0.0;
}

}  // namespace

double realized_variance(std::span<const double> log_prices) {
  require(log_prices.size() >= 2, "realized_variance: need at least 2 prices");
  double rv = 0.0;
  for (std::size_t i = 1; i < log_prices.size(); ++i) {
    const double r = log_prices[i] - log_prices[i - 1];
    rv += r * r;
  }
  return rv;
}

double parzen_weight(double x) {
  require(x >= 0.0 && x <= 1.0, "parzen_weight: x outside [0,1]");
  if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
  const double y = 1.0 - x;
  return 2.0 * y * y * y;
}

double realized_autocovariance(std::span<const double> returns, std::size_t lag) {
  double g = 0.0;
  for (std::size_t j = lag; j < returns.size(); ++j) g += returns[j] * returns[j - lag];
  return g;
}

double realized_kernel(std::span<const double> log_prices, int bandwidth, int jitter) {
  require(bandwidth >= 0, "realized_kernel: negative bandwidth");
  require(jitter >= 1, "realized_kernel: jitter must be >= 1");
  require(log_prices.size() >= 2, "realized_kernel: need at least 2 prices");
  const std::size_t m = static_cast<std::size_t>(jitter);
  require(log_prices.size() >= 2 * m, "realized_kernel: too few prices for jittering");

  // Jittered grid: averaged end points, raw interior prices.
  std::vector<double> grid;
  const std::size_t n_raw = log_prices.size();
  grid.reserve(n_raw - 2 * (m - 1));
  grid.push_back(std::accumulate(log_prices.begin(), log_prices.begin() + static_cast<std::ptrdiff_t>(m), 0.0) /
                 static_cast<double>(m));
  for (std::size_t j = m; j + m < n_raw; ++j) grid.push_back(log_prices[j]);
  grid.push_back(std::accumulate(log_prices.end() - static_cast<std::ptrdiff_t>(m), log_prices.end(), 0.0) /
                 static_cast<double>(m));

  std::vector<double> returns(grid.size() - 1);
  for (std::size_t j = 1; j < grid.size(); ++j) returns[j - 1] = grid[j] - grid[j - 1];
  require(returns.size() >= static_cast<std::size_t>(bandwidth) + 1,
          "realized_kernel: too few returns for bandwidth");

  double rk = realized_autocovariance(returns, 0);
  const double denom = static_cast<double>(bandwidth) + 1.0;
  for (int h = 1; h <= bandwidth; ++h) {
    // gamma_{-h} == gamma_h, hence the factor two
    rk += 2.0 * parzen_weight(h / denom) * realized_autocovariance(returns, static_cast<std::size_t>(h));
  }
  return rk;
}

int optimal_bandwidth(std::size_t n_returns, double xi_squared) {
  require(xi_squared >= 0.0, "optimal_bandwidth: negative xi^2");
  if (xi_squared == 0.0 || n_returns == 0) return 0;
  const double h = kParzenBandwidthConstant * std::pow(xi_squared, 0.4) *
                   std::pow(static_cast<double>(n_returns), 0.6);
  return static_cast<int>(std::ceil(h));
}

BandwidthEstimate select_bandwidth(const ingest::DaySession& session, const BandwidthConfig& cfg) {
  require(session.ticks.size() >= std::max<std::size_t>(cfg.min_ticks, 4),
          "select_bandwidth: insufficient ticks");
  const auto x = log_prices_of(session);

  BandwidthEstimate est;
  est.n_returns = x.size() - 1;
  const double rv_dense = realized_variance(x);
  double rv_sparse = sparse_realized_variance(session, cfg);
  if (!(rv_sparse > 0.0)) rv_sparse = rv_dense;
  est.integrated_variance = rv_sparse;
  est.noise_variance = std::max(0.0, rv_dense - rv_sparse) / (2.0 * static_cast<double>(est.n_returns));
  est.xi_squared = rv_sparse > 0.0 ? est.noise_variance / rv_sparse : 0.0;
  est.bandwidth = std::min(optimal_bandwidth(est.n_returns, est.xi_squared),
                           static_cast<int>(est.n_returns) - 1);
  return est;
}

RkEstimate realized_kernel(const ingest::DaySession& session, int bandwidth, int jitter) {
  const auto x = log_prices_of(session);
  require(x.size() >= 2, "realized_kernel: need at least 2 ticks");
  RkEstimate est;
  est.date = session.date;
  est.bandwidth = bandwidth;
  est.rk = realized_kernel(x, bandwidth, jitter);
  est.n_returns = x.size() - 1 - 2 * (static_cast<std::size_t>(jitter) - 1);
  return est;
}

RkEstimate estimate_day(const ingest::DaySession& session, const BandwidthConfig& cfg) {
  const auto bw = select_bandwidth(session, cfg);
  return realized_kernel(session, bw.bandwidth, cfg.jitter);
}

std::vector<RkEstimate> estimate_days(std::span<const ingest::DaySession> sessions,
                                      const BandwidthConfig& cfg) {
  std::vector<RkEstimate> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) {
    if (s.insufficient || s.ticks.size() < cfg.min_ticks) continue;
    out.push_back(estimate_day(s, cfg));
  }
  return out;
}

RkComponentSeries build_components(std::span<const double> rk,
                                   std::span<const std::chrono::year_month_day> dates) {
  require(rk.size() == dates.size(), "build_components: length mismatch");
  require(rk.size() >= kMonthlyWindow + 1, "build_components: need at least 23 daily values");

  RkComponentSeries out;
  out.reserve(rk.size() - kMonthlyWindow);
  for (std::size_t t = kMonthlyWindow - 1; t + 1 < rk.size(); ++t) {
    ComponentRow row;
    row.date = dates[t];
    row.rk_d = rk[t];
    double w = 0.0;
    for (std::size_t i = t + 1 - kWeeklyWindow; i <= t; ++i) w += rk[i];
    double m = 0.0;
    for (std::size_t i = t + 1 - kMonthlyWindow; i <= t; ++i) m += rk[i];
    row.rk_w = w / static_cast<double>(kWeeklyWindow);
    row.rk_m = m / static_cast<double>(kMonthlyWindow);
    row.target = rk[t + 1];
    out.push_back(row);
  }
  return out;
}

RkComponentSeries build_components(std::span<const RkEstimate> rk_series) {
  std::vector<double> rk;
  std::vector<std::chrono::year_month_day> dates;
  rk.reserve(rk_series.size());
  dates.reserve(rk_series.size());
  for (const auto& e : rk_series) {
    rk.push_back(e.rk);
    dates.push_back(e.date);
  }
  return build_components(rk, dates);
}

}  // namespace cvhar::realized
