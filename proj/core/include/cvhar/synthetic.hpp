#pragma once

// Synthetic data generators for tests, benchmarks and the `simulate`
// subcommand: tick paths with microstructure noise, Inverse-Gaussian
// draws, linear and nonlinear daily volatility processes, copula pairs.

#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

#include "cvhar/copulas.hpp"
#include "cvhar/ingest.hpp"
#include "cvhar/margins.hpp"
#include "cvhar/realized.hpp"

namespace cvhar::synthetic {

using Rng = std::mt19937_64;

/// Uniform on the open interval (0,1).
double open_uniform(Rng& rng);
double standard_normal(Rng& rng);

/// Michael-Schucany-Haas transformation sampler.
double inverse_gaussian(Rng& rng, double mu, double lambda);

/// Consecutive weekdays starting at `first` (moved forward off a weekend).
std::vector<std::chrono::year_month_day> business_days(std::chrono::year_month_day first, std::size_t n);

struct TickDayOptions {
  std::size_t n_ticks = 2000;
  double daily_variance = 1e-4;  // integrated variance of the efficient log price
  double noise_sd = 0.0;         // iid additive noise on log prices
  double start_price = 100.0;
  std::chrono::minutes utc_offset{0};
  std::chrono::minutes open{9 * 60 + 30};
  std::chrono::minutes close{16 * 60};
};

/// One trading day of trades at sorted distinct random times, Brownian
/// efficient price plus noise. Sizes, exchange "D" and empty conditions.
ingest::TickSeries tick_day(Rng& rng, std::chrono::year_month_day date, const TickDayOptions& opts);

/// Daily variance path with log-AR(1) dynamics, mean `level`.
std::vector<double> log_ar_variances(Rng& rng, std::size_t n, double level, double phi, double sigma);

struct HarCoefficients {
  double c = 0.1;
  double beta_d = 0.4;
  double beta_w = 0.3;
  double beta_m = 0.2;
};

/// RK_{t+1} = c + b_d RK_t + b_w mean5 + b_m mean22 + (IG(mu, lambda) - mu).
/// Positivity needs c >= noise_mu. The first 22 values are burn-in draws.
std::vector<double> linear_har_series(Rng& rng, std::size_t n, const HarCoefficients& coef, double noise_mu,
                                      double noise_lambda);

struct NonlinearOptions {
  double a = -0.05;
  double beta_d = 0.35;
  double beta_w = 0.35;
  double beta_m = 0.22;
  double sigma = 0.35;        // log-scale shock size of the latent variance
  double sigma_slope = 0.0;   // shock size grows with the latent log level
  double student_nu = 5.0;    // fat-tailed log shocks; rounded to an integer
  double jump_prob = 0.0;     // chance that a day's RK carries a transient jump
  double jump_log_mean = 1.0; // log jump multiplier ~ N(mean, sd)
  double jump_log_sd = 0.3;
};

/// Latent log-HAR stochastic volatility, log V_{t+1} = a + sum beta
/// log(component of V) + sigma_t eps with t-distributed eps and
/// level-dependent sigma_t; the observed RK_t = V_t J_t carries transient,
/// non-persistent jumps J_t.
std::vector<double> nonlinear_sv_series(Rng& rng, std::size_t n, const NonlinearOptions& opts);

/// Copula-Markov volatility: u_{t+1} = h^{-1}(w | u_t) and RK_t = F^{-1}(u_t).
/// With a Clayton link low-variance regimes are sticky while high-variance
/// days revert fast, so E[RK_{t+1} | RK_t] is far from linear.
std::vector<double> copula_markov_series(Rng& rng, std::size_t n, const copula::PairCopula& link,
                                         const margins::Margin& margin, std::size_t burn = 200);

/// Pairs (u, v) with u uniform and v drawn from h^{-1}(w | u).
std::vector<std::array<double, 2>> copula_pairs(Rng& rng, const copula::PairCopula& c, std::size_t n);

}  // namespace cvhar::synthetic
