#include "cvhar/margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cvhar/error.hpp"
#include "cvhar/numeric.hpp"

namespace cvhar::margins {

namespace {

double clamp_unit(double p) { return std::clamp(p, kCdfClamp, 1.0 - kCdfClamp); }

// exp(a^2/2) * Phi(-a) for a >= 0, without overflow.
double scaled_normal_tail(double a) {
  if (a < 30.0) return std::exp(0.5 * a * a) * numeric::normal_cdf(-a);
  // Mills-ratio asymptotic series
  const double a2 = a * a;
  const double mills = (1.0 / a) * (1.0 - 1.0 / a2 + 3.0 / (a2 * a2) - 15.0 / (a2 * a2 * a2));
  return mills / std::sqrt(2.0 * numeric::kPi);
}

double inverse_gaussian_cdf(double x, double mu, double lambda) {
  const double s = std::sqrt(lambda / x);
  const double b = s * (x / mu - 1.0);
  const double a = s * (x / mu + 1.0);
  // exp(2 lambda/mu) Phi(-a) == phi(b) * exp(a^2/2) Phi(-a) * sqrt(2 pi)
  const double second = std::exp(-0.5 * b * b) * scaled_normal_tail(a);
  return numeric::normal_cdf(b) + second;
}

double sample_sd(std::span<const double> x) {
  const double m = numeric::mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(MarginKind kind) {
  switch (kind) {
    case MarginKind::ecdf: return "ecdf";
    case MarginKind::kernel: return "kernel";
    case MarginKind::inverse_gaussian: return "inverse_gaussian";
    case MarginKind::normal: return "normal";
  }
  return "unknown";
}

MarginKind margin_kind_from_string(std::string_view text) {
  if (text == "ecdf" || text == "E") return MarginKind::ecdf;
  if (text == "kernel" || text == "K") return MarginKind::kernel;
  if (text == "inverse_gaussian" || text == "P" || text == "ig") return MarginKind::inverse_gaussian;
  if (text == "normal") return MarginKind::normal;
  throw ConfigError("unknown margin kind '" + std::string(text) + "'");
}

Margin::Margin(MarginKind kind, std::vector<double> sample, double first, double second)
    : kind_(kind), sample_(std::move(sample)), first_(first), second_(second) {}

Margin Margin::ecdf(std::vector<double> sample) {
  require(!sample.empty(), "ecdf margin: empty sample");
  std::sort(sample.begin(), sample.end());
  return Margin(MarginKind::ecdf, std::move(sample), 0.0, 0.0);
}

Margin Margin::kernel(std::vector<double> sample, double log_bandwidth) {
  require(!sample.empty(), "kernel margin: empty sample");
  require(log_bandwidth > 0.0 && std::isfinite(log_bandwidth), "kernel margin: bandwidth must be positive");
  std::sort(sample.begin(), sample.end());
  for (double v : sample) require(v > 0.0, "kernel margin: sample must be positive");
  Margin m(MarginKind::kernel, std::move(sample), log_bandwidth, 0.0);
  m.log_sample_.reserve(m.sample_.size());
  for (double v : m.sample_) m.log_sample_.push_back(std::log(v));
  return m;
}

Margin Margin::inverse_gaussian(double mu, double lambda) {
  require(mu > 0.0 && lambda > 0.0 && std::isfinite(mu) && std::isfinite(lambda),
          "inverse_gaussian margin: parameters must be positive");
  return Margin(MarginKind::inverse_gaussian, {}, mu, lambda);
}

Margin Margin::normal(double mean, double sd) {
  require(sd > 0.0 && std::isfinite(mean), "normal margin: invalid parameters");
  return Margin(MarginKind::normal, {}, mean, sd);
}

double Margin::cdf(double x) const {
  if (!(x > 0.0)) throw_domain("margin cdf: x must be positive");
  switch (kind_) {
    case MarginKind::ecdf: {
      const auto rank = std::upper_bound(sample_.begin(), sample_.end(), x) - sample_.begin();
      const double n1 = static_cast<double>(sample_.size()) + 1.0;
      return std::clamp(static_cast<double>(rank) / n1, kCdfClamp, (n1 - 1.0) / n1);
    }
    case MarginKind::kernel: {
      const double lx = std::log(x);
      double s = 0.0;
      for (double y : log_sample_) s += numeric::normal_cdf((lx - y) / first_);
      return clamp_unit(s / static_cast<double>(log_sample_.size()));
    }
    case MarginKind::inverse_gaussian:
      return clamp_unit(inverse_gaussian_cdf(x, first_, second_));
    case MarginKind::normal:
      return clamp_unit(numeric::normal_cdf((x - first_) / second_));
  }
  return 0.5;
}

double Margin::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw_domain("margin quantile: p must lie in (0,1)");
  switch (kind_) {
    case MarginKind::ecdf: {
      const double n = static_cast<double>(sample_.size());
      const double k = std::clamp(std::ceil(p * (n + 1.0)), 1.0, n);
      return sample_[static_cast<std::size_t>(k) - 1];
    }
    case MarginKind::kernel: {
      const double target = std::clamp(p, kCdfClamp, 1.0 - kCdfClamp);
      auto f = [&](double ly) {
        double s = 0.0;
        for (double y : log_sample_) s += numeric::normal_cdf((ly - y) / first_);
        return s / static_cast<double>(log_sample_.size()) - target;
      };
      double lo = log_sample_.front() - 8.0 * first_;
      double hi = log_sample_.back() + 8.0 * first_;
      while (f(lo) > 0.0) lo -= 4.0 * first_;
      while (f(hi) < 0.0) hi += 4.0 * first_;
      return std::exp(numeric::solve_bracketed(f, lo, hi, 1e-13));
    }
    case MarginKind::inverse_gaussian: {
      auto f = [&](double x) { return inverse_gaussian_cdf(x, first_, second_) - p; };
      double lo = first_ * 0.5;
      double hi = first_ * 2.0;
      while (f(lo) > 0.0) lo *= 0.5;
      while (f(hi) < 0.0) hi *= 2.0;
      return numeric::solve_bracketed(f, lo, hi, 1e-14 * hi);
    }
    case MarginKind::normal:
      return first_ + second_ * numeric::normal_quantile(p);
  }
  return 0.0;
}

double Margin::lower_tail_mass() const {
  if (kind_ == MarginKind::normal) return numeric::normal_cdf(-first_ / second_);
  return 0.0;
}

std::span<const double> Margin::step_points() const {
  if (kind_ == MarginKind::ecdf) return sample_;
  return {};
}

double silverman_bandwidth(std::span<const double> data) {
  require(data.size() >= 2, "silverman_bandwidth: need at least 2 points");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(data);
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  require(spread > 0.0, "degenerate sample");
  return 0.9 * spread * std::pow(static_cast<double>(data.size()), -0.2);
}

Margin fit_margin(std::span<const double> sample, MarginKind kind, const MarginOptions& opts) {
  if (sample.size() < opts.min_sample) {
    throw_domain("fit_margin: sample size " + std::to_string(sample.size()) + " below minimum " +
                 std::to_string(opts.min_sample));
  }
  for (double v : sample) {
    if (!(v > 0.0) || !std::isfinite(v)) throw_domain("fit_margin: non-positive value in sample");
  }
  const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
  const bool constant = *mn == *mx;

  switch (kind) {
    case MarginKind::ecdf:
      return Margin::ecdf(std::vector<double>(sample.begin(), sample.end()));
    case MarginKind::kernel: {
      if (constant) throw_domain("fit_margin: degenerate sample");
      std::vector<double> logs;
      logs.reserve(sample.size());
      for (double v : sample) logs.push_back(std::log(v));
      const double bw = opts.kernel_bandwidth ? *opts.kernel_bandwidth : silverman_bandwidth(logs);
      return Margin::kernel(std::vector<double>(sample.begin(), sample.end()), bw);
    }
    case MarginKind::inverse_gaussian: {
      if (constant) throw_domain("fit_margin: degenerate sample");
      const double n = static_cast<double>(sample.size());
      const double mu = numeric::mean(sample);
      double s = 0.0;
      for (double v : sample) s += 1.0 / v - 1.0 / mu;
      if (!(s > 0.0)) throw_domain("fit_margin: degenerate sample");
      return Margin::inverse_gaussian(mu, n / s);
    }
    case MarginKind::normal: {
      if (constant) throw_domain("fit_margin: degenerate sample");
      return Margin::normal(numeric::mean(sample), sample_sd(sample));
    }
  }
  throw_domain("fit_margin: unknown kind");
}

const Margin& ComponentMargins::operator[](std::size_t i) const {
  switch (i) {
    case 0: return monthly;
    case 1: return weekly;
    case 2: return daily;
    case 3: return target;
  }
  throw_domain("ComponentMargins: index out of range");
}

ComponentMargins fit_component_margins(std::span<const realized::ComponentRow> window, MarginKind kind,
                                       const MarginOptions& opts) {
  std::vector<double> m, w, d;
  m.reserve(window.size());
  w.reserve(window.size());
  d.reserve(window.size());
  for (const auto& row : window) {
    m.push_back(row.rk_m);
    w.push_back(row.rk_w);
    d.push_back(row.rk_d);
  }
  Margin daily = fit_margin(d, kind, opts);
  return ComponentMargins{fit_margin(m, kind, opts), fit_margin(w, kind, opts), daily, daily};
}

UniformSample pit_transform(std::span<const realized::ComponentRow> series, const ComponentMargins& margins) {
  UniformSample out;
  out.reserve(series.size());
  for (const auto& row : series) {
    out.push_back({margins.monthly.cdf(row.rk_m), margins.weekly.cdf(row.rk_w), margins.daily.cdf(row.rk_d),
                   margins.target.cdf(row.target)});
  }
  return out;
}

}  // namespace cvhar::margins
