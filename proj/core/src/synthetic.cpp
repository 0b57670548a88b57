#include "cvhar/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "cvhar/error.hpp"

namespace cvhar::synthetic {

double open_uniform(Rng& rng) {
  const auto bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  // Box-Muller: identical draws on every standard library
  const double u1 = open_uniform(rng);
  const double u2 = open_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double inverse_gaussian(Rng& rng, double mu, double lambda) {
  require(mu > 0.0 && lambda > 0.0, "inverse_gaussian: parameters must be positive");
  const double z = standard_normal(rng);
  const double y = z * z;
  const double x = mu + mu * mu * y / (2.0 * lambda) -
                   mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
  return open_uniform(rng) <= mu / (mu + x) ? x : mu * mu / x;
}

std::vector<std::chrono::year_month_day> business_days(std::chrono::year_month_day first, std::size_t n) {
  using namespace std::chrono;
  std::vector<year_month_day> out;
  out.reserve(n);
  sys_days d{first};
  while (out.size() < n) {
    const weekday wd{d};
    if (wd != Saturday && wd != Sunday) out.emplace_back(d);
    d += days{1};
  }
  return out;
}

ingest::TickSeries tick_day(Rng& rng, std::chrono::year_month_day date, const TickDayOptions& opts) {
  using namespace std::chrono;
  require(opts.n_ticks >= 2, "tick_day: need at least 2 ticks");
  require(opts.close > opts.open, "tick_day: empty session");
  const std::int64_t day_ns = duration_cast<nanoseconds>(sys_days{date}.time_since_epoch()).count();
  const std::int64_t open_ns = day_ns + duration_cast<nanoseconds>(opts.open - opts.utc_offset).count();
  const std::int64_t span_ns = duration_cast<nanoseconds>(opts.close - opts.open).count();

  // distinct millisecond timestamps
  const std::int64_t slots = span_ns / 1'000'000;
  require(static_cast<std::int64_t>(opts.n_ticks) < slots, "tick_day: too many ticks for the session");
  std::set<std::int64_t> times;
  while (times.size() < opts.n_ticks) {
    times.insert(static_cast<std::int64_t>(open_uniform(rng) * static_cast<double>(slots)));
  }

  ingest::TickSeries out;
  out.reserve(opts.n_ticks);
  double x = std::log(opts.start_price);
  std::int64_t prev = 0;
  for (std::int64_t slot : times) {
    const double dt = static_cast<double>(slot - prev) / static_cast<double>(slots);
    x += std::sqrt(opts.daily_variance * dt) * standard_normal(rng);
    prev = slot;
    ingest::Tick t;
    t.timestamp = open_ns + slot * 1'000'000;
    t.price = std::exp(x + opts.noise_sd * standard_normal(rng));
    t.size = 100;
    t.exchange = "D";
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> log_ar_variances(Rng& rng, std::size_t n, double level, double phi, double sigma) {
  require(level > 0.0 && std::abs(phi) < 1.0 && sigma >= 0.0, "log_ar_variances: invalid parameters");
  std::vector<double> out(n);
  const double mean_log = std::log(level) - 0.5 * sigma * sigma / (1.0 - phi * phi);
  double z = mean_log;
  for (std::size_t i = 0; i < n; ++i) {
    z = mean_log + phi * (z - mean_log) + sigma * standard_normal(rng);
    out[i] = std::exp(z);
  }
  return out;
}

namespace {

double trailing_mean(const std::vector<double>& x, std::size_t end, std::size_t len) {
  double s = 0.0;
  for (std::size_t i = end + 1 - len; i <= end; ++i) s += x[i];
  return s / static_cast<double>(len);
}

}  // namespace

std::vector<double> linear_har_series(Rng& rng, std::size_t n, const HarCoefficients& coef, double noise_mu,
                                      double noise_lambda) {
  const double persistence = coef.beta_d + coef.beta_w + coef.beta_m;
  require(persistence < 1.0, "linear_har_series: coefficients must sum below one");
  require(coef.c >= noise_mu, "linear_har_series: c must be at least the noise mean to stay positive");
  const double level = coef.c / (1.0 - persistence);
  std::vector<double> x(n + realized::kMonthlyWindow, level);
  for (std::size_t t = realized::kMonthlyWindow - 1; t + 1 < x.size(); ++t) {
    const double mean_part = coef.c + coef.beta_d * x[t] + coef.beta_w * trailing_mean(x, t, 5) +
                             coef.beta_m * trailing_mean(x, t, 22);
    x[t + 1] = mean_part + inverse_gaussian(rng, noise_mu, noise_lambda) - noise_mu;
  }
  return std::vector<double>(x.begin() + realized::kMonthlyWindow, x.end());
}

std::vector<double> nonlinear_sv_series(Rng& rng, std::size_t n, const NonlinearOptions& o) {
  require(o.student_nu >= 3.0, "nonlinear_sv_series: nu must be at least 3");
  require(o.jump_prob >= 0.0 && o.jump_prob < 1.0, "nonlinear_sv_series: jump_prob outside [0,1)");
  const double persistence = o.beta_d + o.beta_w + o.beta_m;
  require(persistence < 1.0, "nonlinear_sv_series: coefficients must sum below one");
  const int nu = static_cast<int>(std::lround(o.student_nu));
  const double t_scale = std::sqrt((nu - 2.0) / nu);
  auto student = [&] {
    double chi2 = 0.0;
    for (int k = 0; k < nu; ++k) {
      const double z = standard_normal(rng);
      chi2 += z * z;
    }
    return standard_normal(rng) / std::sqrt(chi2 / nu);
  };
  const std::size_t burn = 250;
  const double level = o.a / (1.0 - persistence);
  std::vector<double> v(n + burn + realized::kMonthlyWindow, std::exp(level));
  for (std::size_t t = realized::kMonthlyWindow - 1; t + 1 < v.size(); ++t) {
    const double lv = std::log(v[t]);
    const double m = o.a + o.beta_d * lv + o.beta_w * std::log(trailing_mean(v, t, 5)) +
                     o.beta_m * std::log(trailing_mean(v, t, 22));
    const double s = std::clamp(o.sigma + o.sigma_slope * (lv - level), 0.05, 2.0 * o.sigma + 0.05);
    v[t + 1] = std::exp(m + s * t_scale * student());
  }
  std::vector<double> out(v.end() - static_cast<std::ptrdiff_t>(n), v.end());
  for (double& x : out) {
    if (open_uniform(rng) < o.jump_prob) x *= std::exp(o.jump_log_mean + o.jump_log_sd * standard_normal(rng));
  }
  return out;
}

std::vector<double> copula_markov_series(Rng& rng, std::size_t n, const copula::PairCopula& link,
                                         const margins::Margin& margin, std::size_t burn) {
  copula::validate(link);
  std::vector<double> out;
  out.reserve(n);
  double u = open_uniform(rng);
  for (std::size_t i = 0; i < n + burn; ++i) {
    u = copula::h_inverse(link, open_uniform(rng), u);
    if (i >= burn) out.push_back(margin.quantile(u));
  }
  return out;
}

std::vector<std::array<double, 2>> copula_pairs(Rng& rng, const copula::PairCopula& c, std::size_t n) {
  std::vector<std::array<double, 2>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = open_uniform(rng);
    const double w = open_uniform(rng);
    out.push_back({u, copula::h_inverse(c, w, u)});
  }
  return out;
}

}  // namespace cvhar::synthetic
