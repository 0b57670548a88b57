#pragma once

// Scalar numerics shared by the statistical modules: normal and Student-t
// helpers, bivariate normal CDF, rank correlation, 1-D optimisation and
// root finding, and the adaptive Gauss-Legendre integrator used for
// conditional expectations.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cvhar::numeric {

inline constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);
double student_t_log_pdf(double x, double nu);

/// Upper tail probability of a chi-squared variate with `dof` degrees of freedom.
double chi_squared_sf(double x, double dof);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
/// Genz's refinement of the Drezner-Wesolowsky Gauss-Legendre scheme,
/// accurate to roughly 1e-15 absolute.
double bivariate_normal_cdf(double x, double y, double rho);

/// Kendall's tau-b in O(n log n) (Knight's merge-sort algorithm).
double kendall_tau(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
double median(std::vector<double> x);

struct MinimizeResult {
  double x;
  double fx;
};

/// Bounded Brent minimisation of a univariate function on [lo, hi].
MinimizeResult minimize_bounded(const std::function<double(double)>& f, double lo,
                                double hi, int max_iter = 200);

/// Bracketed root of a monotone function with f(lo), f(hi) of opposite
/// sign. Falls back to plain bisection when the fast solver stalls.
double solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-12, int max_iter = 200);

struct QuadratureOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-14;
  int initial_panels = 4;
  int max_panels = 1 << 14;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Composite 15-point Gauss-Legendre rule on [a, b]; the panel count is
/// doubled until two successive estimates agree to the requested tolerance.
QuadratureResult integrate_gauss_legendre(const std::function<double(double)>& f,
                                          double a, double b,
                                          const QuadratureOptions& opts = {});

}  // namespace cvhar::numeric
