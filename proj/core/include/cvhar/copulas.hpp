#pragma once

// Bivariate copula families: CDF, density, h-functions and their
// inverses, Kendall's tau maps, maximum-likelihood fitting with AIC
// family selection, and the Kendall-tau independence test.
//
// Only positively dependent Archimedean copulas are supported (no
// rotations). All families here are exchangeable, C(u,v) == C(v,u), so the
// h-function h(u|v) = dC(u,v)/dv serves both conditioning directions.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cvhar::copula {

enum class Family { independence, gaussian, student_t, clayton, gumbel, frank, joe };

std::string_view to_string(Family family);
Family family_from_string(std::string_view text);

/// Named candidate sets: "A" (Archimedean only) and "AGT" (plus Gaussian and t).
enum class FamilySet { A, AGT };

std::string_view to_string(FamilySet set);
FamilySet family_set_from_string(std::string_view text);
std::vector<Family> families_of(FamilySet set);

struct PairCopula {
  Family family = Family::independence;
  double theta = 0.0;  // rho for gaussian/student_t
  double nu = 0.0;     // student_t degrees of freedom
  double loglik = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;

  static PairCopula independence() { return {}; }
  static PairCopula make(Family f, double theta, double nu = 0.0) { return {f, theta, nu, 0.0, 0.0, 0}; }

  int n_parameters() const;
};

/// Throws DomainError when the parameter lies outside the family domain:
/// clayton > 0, gumbel/joe >= 1, frank != 0, |rho| < 1, nu > 2.
void validate(const PairCopula& c);

/// C(u,v) on the closed unit square.
double cdf(const PairCopula& c, double u, double v);

double log_density(const PairCopula& c, double u, double v);
/// Throws instead of returning an infinite density near the corners.
double density(const PairCopula& c, double u, double v);

/// Step of the forward difference used for the Gaussian and t h-functions.
inline constexpr double kHStep = 1e-3;
/// h-function outputs and inverses are clamped to [kHClamp, 1 - kHClamp].
inline constexpr double kHClamp = 1e-10;

/// F(u|v) = dC(u,v)/dv. Closed form for independence and the Archimedean
/// families; forward difference (C(u,v+d)-C(u,v))/d with d = 1e-3 (v+d
/// capped at 1) for Gaussian and t.
double h_function(const PairCopula& c, double u, double v);

/// Closed-form conditional CDF for every family (Gaussian and t included).
/// Used as a reference for the finite-difference route.
double h_function_exact(const PairCopula& c, double u, double v);

/// Solves h(u|v) = w for u; closed form where available, otherwise a
/// bracketed root search to 1e-10.
double h_inverse(const PairCopula& c, double w, double v);

double tau_from_parameter(Family family, double theta);
/// Inverse of tau_from_parameter; throws when tau is not attainable.
double parameter_from_tau(Family family, double tau);

struct ParameterBounds {
  double lo;
  double hi;
};
ParameterBounds parameter_bounds(Family family);
inline constexpr double kNuMin = 2.05;
inline constexpr double kNuMax = 30.0;

double log_likelihood(const PairCopula& c, std::span<const double> u, std::span<const double> v);

struct FitOptions {
  std::size_t min_obs = 30;
  // Select independence outright when the tau test does not reject.
  bool independence_pretest = false;
  double alpha = 0.05;
};

/// Maximum likelihood for a single family, initialised by tau inversion.
PairCopula fit_family(Family family, std::span<const double> u, std::span<const double> v,
                      double empirical_tau);

/// Fits every candidate family and returns the one with minimal AIC.
/// Archimedean candidates other than Frank are skipped when tau < 0.
PairCopula fit_pair(std::span<const double> u, std::span<const double> v, std::span<const Family> families,
                    const FitOptions& opts = {});

struct IndependenceTestResult {
  double tau = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

/// Asymptotic test of tau = 0: z = sqrt(9n(n-1) / (2(2n+5))) tau_hat.
IndependenceTestResult independence_test(std::span<const double> u, std::span<const double> v,
                                         double alpha = 0.05);

}  // namespace cvhar::copula
