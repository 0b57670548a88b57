#pragma once

// Univariate margins for the volatility components: rescaled ECDF,
// log-domain Gaussian-kernel CDF and Inverse-Gaussian MLE, plus the
// probability-integral transform onto (0,1)^4.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cvhar/realized.hpp"

namespace cvhar::margins {

/// `normal` is a reference margin used by the Gaussian oracles; it is not
/// selectable in run configurations.
enum class MarginKind { ecdf, kernel, inverse_gaussian, normal };

std::string_view to_string(MarginKind kind);
MarginKind margin_kind_from_string(std::string_view text);

/// Lower/upper clamp applied to model CDFs.
inline constexpr double kCdfClamp = 1e-10;

class Margin {
 public:
  static Margin ecdf(std::vector<double> sample);
  static Margin kernel(std::vector<double> sample, double log_bandwidth);
  static Margin inverse_gaussian(double mu, double lambda);
  static Margin normal(double mean, double sd);

  MarginKind kind() const { return kind_; }

  /// Always strictly inside (0,1). Throws for x <= 0.
  double cdf(double x) const;
  /// Generalised inverse of cdf; throws for p outside (0,1).
  double quantile(double p) const;

  /// Probability mass the model places on (-inf, 0]; zero except for `normal`.
  double lower_tail_mass() const;

  /// Sorted support points where an ECDF steps; empty for continuous kinds.
  std::span<const double> step_points() const;

  const std::vector<double>& sample() const { return sample_; }
  double log_bandwidth() const { return first_; }
  double mu() const { return first_; }
  double lambda() const { return second_; }
  double mean() const { return first_; }
  double sd() const { return second_; }

 private:
  Margin(MarginKind kind, std::vector<double> sample, double first, double second);

  MarginKind kind_;
  std::vector<double> sample_;      // sorted; ecdf and kernel only
  std::vector<double> log_sample_;  // kernel only
  double first_ = 0.0;
  double second_ = 0.0;
};

struct MarginOptions {
  std::size_t min_sample = 30;
  // Bandwidth on the log scale; Silverman's rule when unset.
  std::optional<double> kernel_bandwidth;
};

Margin fit_margin(std::span<const double> sample, MarginKind kind, const MarginOptions& opts = {});

/// Silverman's rule of thumb 0.9 min(sd, IQR/1.34) n^{-1/5}.
double silverman_bandwidth(std::span<const double> data);

/// Columns ordered (monthly, weekly, daily, target).
using UniformRow = std::array<double, 4>;
using UniformSample = std::vector<UniformRow>;

struct ComponentMargins {
  Margin monthly;
  Margin weekly;
  Margin daily;
  Margin target;

  const Margin& operator[](std::size_t i) const;
};

/// Fits monthly, weekly and daily margins; the target shares the daily
/// margin since both are draws of the same daily RK.
ComponentMargins fit_component_margins(std::span<const realized::ComponentRow> window, MarginKind kind,
                                       const MarginOptions& opts = {});

UniformSample pit_transform(std::span<const realized::ComponentRow> series, const ComponentMargins& margins);

}  // namespace cvhar::margins
