#include "cvhar/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvhar/error.hpp"
#include "cvhar/numeric.hpp"

namespace cvhar::copula {

namespace {

constexpr double kFrankZero = 1e-10;

bool is_archimedean(Family f) {
  return f == Family::clayton || f == Family::gumbel || f == Family::frank || f == Family::joe;
}

double clamp_h(double x) { return std::clamp(x, kHClamp, 1.0 - kHClamp); }

void require_open_unit(double u, double v) {
  if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) throw_domain("copula: arguments must lie in (0,1)");
}

// log(exp(a) + exp(b) - 1) for a, b >= 0
double log_sum_exp_minus_one(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

// ---- Clayton ---------------------------------------------------------------

double clayton_log_s(double theta, double u, double v) {
  return log_sum_exp_minus_one(-theta * std::log(u), -theta * std::log(v));
}

double clayton_cdf(double theta, double u, double v) { return std::exp(-clayton_log_s(theta, u, v) / theta); }

double clayton_log_density(double theta, double u, double v) {
  return std::log1p(theta) - (theta + 1.0) * (std::log(u) + std::log(v)) -
         (1.0 / theta + 2.0) * clayton_log_s(theta, u, v);
}

double clayton_h(double theta, double u, double v) {
  return std::exp(-(theta + 1.0) * std::log(v) - (1.0 / theta + 1.0) * clayton_log_s(theta, u, v));
}

double clayton_h_inverse(double theta, double w, double v) {
  // u = ((w v^{theta+1})^{-theta/(theta+1)} + 1 - v^{-theta})^{-1/theta}, in logs
  const double a = -theta / (theta + 1.0) * (std::log(w) + (theta + 1.0) * std::log(v));
  const double b = -theta * std::log(v);
  // s = e^a - e^b + 1 >= 1 since w <= 1
  const double s = std::exp(a) - std::exp(b) + 1.0;
  const double log_s = s > 1e300 || !std::isfinite(s) ? a + std::log1p(-std::exp(b - a) + std::exp(-a)) : std::log(s);
  return std::exp(-log_s / theta);
}

// ---- Gumbel ----------------------------------------------------------------

struct GumbelTerms {
  double lu, lv, x, y, sum, a;
};

GumbelTerms gumbel_terms(double theta, double u, double v) {
  GumbelTerms t{};
  t.lu = -std::log(u);
  t.lv = -std::log(v);
  t.x = std::pow(t.lu, theta);
  t.y = std::pow(t.lv, theta);
  t.sum = t.x + t.y;
  t.a = std::pow(t.sum, 1.0 / theta);
  return t;
}

double gumbel_cdf(double theta, double u, double v) { return std::exp(-gumbel_terms(theta, u, v).a); }

double gumbel_log_density(double theta, double u, double v) {
  const auto t = gumbel_terms(theta, u, v);
  return -t.a + t.lu + t.lv + (theta - 1.0) * (std::log(t.lu) + std::log(t.lv)) +
         (-2.0 + 1.0 / theta) * std::log(t.sum) + std::log(t.a + theta - 1.0);
}

double gumbel_h(double theta, double u, double v) {
  const auto t = gumbel_terms(theta, u, v);
  return std::exp(-t.a + (1.0 / theta - 1.0) * std::log(t.sum) + (theta - 1.0) * std::log(t.lv) + t.lv);
}

// ---- Frank -----------------------------------------------------------------

double frank_cdf(double theta, double u, double v) {
  if (std::abs(theta) < kFrankZero) return u * v;
  const double r = std::expm1(-theta * u) * std::expm1(-theta * v) / std::expm1(-theta);
  return -std::log1p(r) / theta;
}

double frank_log_density(double theta, double u, double v) {
  if (std::abs(theta) < kFrankZero) return 0.0;
  const double e1 = -std::expm1(-theta);
  const double eu = -std::expm1(-theta * u);
  const double ev = -std::expm1(-theta * v);
  return std::log(theta * e1) - theta * (u + v) - 2.0 * std::log(std::abs(e1 - eu * ev));
}

double frank_h(double theta, double u, double v) {
  if (std::abs(theta) < kFrankZero) return u;
  const double num = std::exp(-theta * v) * std::expm1(-theta * u);
  const double den = std::expm1(-theta) + std::expm1(-theta * u) * std::expm1(-theta * v);
  return num / den;
}

double frank_h_inverse(double theta, double w, double v) {
  if (std::abs(theta) < kFrankZero) return w;
  const double r = w * std::expm1(-theta) / (w + (1.0 - w) * std::exp(-theta * v));
  return -std::log1p(r) / theta;
}

// ---- Joe -------------------------------------------------------------------

struct JoeTerms {
  double ub, vb, a, b, s;
};

JoeTerms joe_terms(double theta, double u, double v) {
  JoeTerms t{};
  t.ub = 1.0 - u;
  t.vb = 1.0 - v;
  t.a = std::pow(t.ub, theta);
  t.b = std::pow(t.vb, theta);
  t.s = t.a + t.b - t.a * t.b;
  return t;
}

double joe_cdf(double theta, double u, double v) { return 1.0 - std::pow(joe_terms(theta, u, v).s, 1.0 / theta); }

double joe_log_density(double theta, double u, double v) {
  const auto t = joe_terms(theta, u, v);
  return (1.0 / theta - 2.0) * std::log(t.s) + (theta - 1.0) * (std::log(t.ub) + std::log(t.vb)) +
         std::log(theta - 1.0 + t.s);
}

double joe_h(double theta, double u, double v) {
  const auto t = joe_terms(theta, u, v);
  return std::pow(t.vb, theta - 1.0) * (1.0 - t.a) * std::pow(t.s, 1.0 / theta - 1.0);
}

// ---- Gaussian / Student t ----------------------------------------------------

double gaussian_cdf(double rho, double u, double v) {
  return numeric::bivariate_normal_cdf(numeric::normal_quantile(u), numeric::normal_quantile(v), rho);
}

double gaussian_log_density(double rho, double u, double v) {
  const double x = numeric::normal_quantile(u);
  const double y = numeric::normal_quantile(v);
  const double r2 = 1.0 - rho * rho;
  return -0.5 * std::log(r2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2);
}

double gaussian_h_exact(double rho, double u, double v) {
  const double x = numeric::normal_quantile(u);
  const double y = numeric::normal_quantile(v);
  return numeric::normal_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

// P(U <= u | V = v) evaluated from quantiles on the t scale.
double t_conditional(double x, double y, double rho, double nu) {
  const double scale = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
  return numeric::student_t_cdf((x - rho * y) / scale, nu + 1.0);
}

double t_log_density_xy(double x, double y, double rho, double nu) {
  const double r2 = 1.0 - rho * rho;
  const double q = (x * x + y * y - 2.0 * rho * x * y) / (nu * r2);
  return std::lgamma((nu + 2.0) / 2.0) + std::lgamma(nu / 2.0) - 2.0 * std::lgamma((nu + 1.0) / 2.0) -
         0.5 * std::log(r2) - (nu + 2.0) / 2.0 * std::log1p(q) +
         (nu + 1.0) / 2.0 * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
}

double t_log_density(double rho, double nu, double u, double v) {
  return t_log_density_xy(numeric::student_t_quantile(u, nu), numeric::student_t_quantile(v, nu), rho, nu);
}

double t_cdf(double rho, double nu, double u, double v) {
  // C(u,v) = int_{-inf}^{y_v} f_nu(y) P(U <= u | V = T_nu(y)) dy
  const double x = numeric::student_t_quantile(u, nu);
  const double yv = numeric::student_t_quantile(v, nu);
  auto g = [&](double y) {
    if (!std::isfinite(y)) return 0.0;
    return std::exp(numeric::student_t_log_pdf(y, nu)) * t_conditional(x, y, rho, nu);
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      g, -std::numeric_limits<double>::infinity(), yv, 15, 1e-12, &err);
  return std::clamp(value, 0.0, std::min(u, v));
}

double t_h_exact(double rho, double nu, double u, double v) {
  return t_conditional(numeric::student_t_quantile(u, nu), numeric::student_t_quantile(v, nu), rho, nu);
}

// (C(u,v+d) - C(u,v)) / d. The increment is evaluated as the integral of
// dC/dv over [v, v+d], which is smooth on that short interval, so an
// 8-point Gauss-Legendre rule reproduces it to rounding error without the
// cancellation of differencing two CDF values.
double forward_difference_h(const PairCopula& c, double u, double v) {
  const double vp = std::min(v + kHStep, 1.0);
  const double step = vp - v;
  using rule = boost::math::quadrature::gauss<double, 8>;
  const double x = c.family == Family::student_t ? numeric::student_t_quantile(u, c.nu) : numeric::normal_quantile(u);
  auto dcdv = [&](double s) {
    if (s >= 1.0) return 0.0;
    if (c.family == Family::student_t) return t_conditional(x, numeric::student_t_quantile(s, c.nu), c.theta, c.nu);
    return numeric::normal_cdf((x - c.theta * numeric::normal_quantile(s)) / std::sqrt(1.0 - c.theta * c.theta));
  };
  return rule::integrate(dcdv, v, vp) / step;
}

double numeric_h_inverse(const PairCopula& c, double w, double v) {
  auto f = [&](double u) { return h_function(c, u, v) - w; };
  const double lo = kHClamp;
  const double hi = 1.0 - kHClamp;
  if (f(lo) >= 0.0) return lo;
  if (f(hi) <= 0.0) return hi;
  return numeric::solve_bracketed(f, lo, hi, 1e-10);
}

double debye1(double x) {
  // (1/x) int_0^x t/(e^t-1) dt
  using rule = boost::math::quadrature::gauss<double, 30>;
  auto f = [](double t) { return std::abs(t) < 1e-12 ? 1.0 : t / std::expm1(t); };
  return rule::integrate(f, 0.0, x) / x;
}

double joe_tau(double theta) {
  // tau = 1 - 4 sum_k 1/(k (theta k + 2)(theta (k-1) + 2)) with a tail correction
  constexpr int kTerms = 20000;
  double s = 0.0;
  for (int k = kTerms; k >= 1; --k) {
    const double kd = k;
    s += 1.0 / (kd * (theta * kd + 2.0) * (theta * (kd - 1.0) + 2.0));
  }
  const double tail = 1.0 / (2.0 * theta * theta * kTerms * (kTerms + 0.5));
  return 1.0 - 4.0 * (s + tail);
}

double bisect_parameter(Family family, double tau, double lo, double hi) {
  auto f = [&](double th) { return tau_from_parameter(family, th) - tau; };
  return numeric::solve_bracketed(f, lo, hi, 1e-12);
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::independence: return "independence";
    case Family::gaussian: return "gaussian";
    case Family::student_t: return "student_t";
    case Family::clayton: return "clayton";
    case Family::gumbel: return "gumbel";
    case Family::frank: return "frank";
    case Family::joe: return "joe";
  }
  return "unknown";
}

Family family_from_string(std::string_view text) {
  for (Family f : {Family::independence, Family::gaussian, Family::student_t, Family::clayton, Family::gumbel,
                   Family::frank, Family::joe}) {
    if (to_string(f) == text) return f;
  }
  if (text == "t") return Family::student_t;
  throw ConfigError("unknown copula family '" + std::string(text) + "'");
}

std::string_view to_string(FamilySet set) { return set == FamilySet::A ? "A" : "AGT"; }

FamilySet family_set_from_string(std::string_view text) {
  if (text == "A") return FamilySet::A;
  if (text == "AGT") return FamilySet::AGT;
  throw ConfigError("unknown family set '" + std::string(text) + "' (expected A or AGT)");
}

std::vector<Family> families_of(FamilySet set) {
  std::vector<Family> out{Family::clayton, Family::gumbel, Family::frank, Family::joe};
  if (set == FamilySet::AGT) {
    out.push_back(Family::gaussian);
    out.push_back(Family::student_t);
  }
  return out;
}

int PairCopula::n_parameters() const {
  switch (family) {
    case Family::independence: return 0;
    case Family::student_t: return 2;
    default: return 1;
  }
}

void validate(const PairCopula& c) {
  const double th = c.theta;
  bool ok = std::isfinite(th);
  switch (c.family) {
    case Family::independence: break;
    case Family::clayton: ok = ok && th > 0.0; break;
    case Family::gumbel:
    case Family::joe: ok = ok && th >= 1.0; break;
    case Family::frank: ok = ok && th != 0.0; break;
    case Family::gaussian: ok = ok && th > -1.0 && th < 1.0; break;
    case Family::student_t: ok = ok && th > -1.0 && th < 1.0 && c.nu > 2.0 && std::isfinite(c.nu); break;
  }
  if (!ok) throw_domain(std::string("copula parameter outside the ") + std::string(to_string(c.family)) + " domain");
}

double cdf(const PairCopula& c, double u, double v) {
  validate(c);
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw_domain("copula cdf: arguments outside [0,1]");
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  double value = 0.0;
  switch (c.family) {
    case Family::independence: value = u * v; break;
    case Family::clayton: value = clayton_cdf(c.theta, u, v); break;
    case Family::gumbel: value = gumbel_cdf(c.theta, u, v); break;
    case Family::frank: value = frank_cdf(c.theta, u, v); break;
    case Family::joe: value = joe_cdf(c.theta, u, v); break;
    case Family::gaussian: value = gaussian_cdf(c.theta, u, v); break;
    case Family::student_t: value = t_cdf(c.theta, c.nu, u, v); break;
  }
  return std::clamp(value, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double log_density(const PairCopula& c, double u, double v) {
  validate(c);
  require_open_unit(u, v);
  switch (c.family) {
    case Family::independence: return 0.0;
    case Family::clayton: return clayton_log_density(c.theta, u, v);
    case Family::gumbel: return gumbel_log_density(c.theta, u, v);
    case Family::frank: return frank_log_density(c.theta, u, v);
    case Family::joe: return joe_log_density(c.theta, u, v);
    case Family::gaussian: return gaussian_log_density(c.theta, u, v);
    case Family::student_t: return t_log_density(c.theta, c.nu, u, v);
  }
  return 0.0;
}

double density(const PairCopula& c, double u, double v) {
  const double ld = log_density(c, u, v);
  const double d = std::exp(ld);
  if (!std::isfinite(d) || std::isnan(ld)) throw_domain("copula density overflow near the corner of the unit square");
  return d;
}

double h_function(const PairCopula& c, double u, double v) {
  validate(c);
  require_open_unit(u, v);
  switch (c.family) {
    case Family::gaussian:
    case Family::student_t: return clamp_h(forward_difference_h(c, u, v));
    default: return h_function_exact(c, u, v);
  }
}

double h_function_exact(const PairCopula& c, double u, double v) {
  validate(c);
  require_open_unit(u, v);
  double h = 0.0;
  switch (c.family) {
    case Family::independence: h = u; break;
    case Family::clayton: h = clayton_h(c.theta, u, v); break;
    case Family::gumbel: h = gumbel_h(c.theta, u, v); break;
    case Family::frank: h = frank_h(c.theta, u, v); break;
    case Family::joe: h = joe_h(c.theta, u, v); break;
    case Family::gaussian: h = gaussian_h_exact(c.theta, u, v); break;
    case Family::student_t: h = t_h_exact(c.theta, c.nu, u, v); break;
  }
  return clamp_h(h);
}

double h_inverse(const PairCopula& c, double w, double v) {
  validate(c);
  require_open_unit(w, v);
  switch (c.family) {
    case Family::independence: return clamp_h(w);
    case Family::clayton: return clamp_h(clayton_h_inverse(c.theta, w, v));
    case Family::frank: return clamp_h(frank_h_inverse(c.theta, w, v));
    default: return numeric_h_inverse(c, w, v);
  }
}

double tau_from_parameter(Family family, double theta) {
  switch (family) {
    case Family::independence: return 0.0;
    case Family::clayton: return theta / (theta + 2.0);
    case Family::gumbel: return 1.0 - 1.0 / theta;
    case Family::gaussian:
    case Family::student_t: return 2.0 / numeric::kPi * std::asin(theta);
    case Family::frank:
      if (std::abs(theta) < 1e-6) return theta / 9.0;  // tau ~ theta/9 near zero
      return 1.0 - 4.0 / theta + 4.0 * debye1(theta) / theta;
    case Family::joe: return theta == 1.0 ? 0.0 : joe_tau(theta);
  }
  return 0.0;
}

ParameterBounds parameter_bounds(Family family) {
  switch (family) {
    case Family::independence: return {0.0, 0.0};
    case Family::clayton: return {1e-4, 40.0};
    case Family::gumbel: return {1.0, 30.0};
    case Family::frank: return {-40.0, 40.0};
    case Family::joe: return {1.0, 30.0};
    case Family::gaussian:
    case Family::student_t: return {-0.999, 0.999};
  }
  return {0.0, 0.0};
}

double parameter_from_tau(Family family, double tau) {
  if (!(tau > -1.0 && tau < 1.0)) throw_domain("parameter_from_tau: tau outside (-1,1)");
  switch (family) {
    case Family::independence:
      if (tau != 0.0) throw_domain("parameter_from_tau: independence attains only tau = 0");
      return 0.0;
    case Family::clayton:
      if (tau <= 0.0) throw_domain("parameter_from_tau: clayton requires tau > 0");
      return 2.0 * tau / (1.0 - tau);
    case Family::gumbel:
      if (tau < 0.0) throw_domain("parameter_from_tau: gumbel requires tau >= 0");
      return 1.0 / (1.0 - tau);
    case Family::gaussian:
    case Family::student_t: return std::sin(numeric::kPi * tau / 2.0);
    case Family::frank: {
      if (tau == 0.0) throw_domain("parameter_from_tau: frank cannot attain tau = 0");
      const auto b = parameter_bounds(Family::frank);
      if (tau >= tau_from_parameter(Family::frank, b.hi) || tau <= tau_from_parameter(Family::frank, b.lo)) {
        throw_domain("parameter_from_tau: tau outside the supported frank range");
      }
      return tau > 0.0 ? bisect_parameter(family, tau, 1e-8, b.hi) : bisect_parameter(family, tau, b.lo, -1e-8);
    }
    case Family::joe: {
      if (tau < 0.0) throw_domain("parameter_from_tau: joe requires tau >= 0");
      if (tau == 0.0) return 1.0;
      const auto b = parameter_bounds(Family::joe);
      if (tau >= tau_from_parameter(Family::joe, b.hi)) {
        throw_domain("parameter_from_tau: tau outside the supported joe range");
      }
      return bisect_parameter(family, tau, 1.0, b.hi);
    }
  }
  return 0.0;
}

double log_likelihood(const PairCopula& c, std::span<const double> u, std::span<const double> v) {
  require(u.size() == v.size(), "log_likelihood: length mismatch");
  if (c.family == Family::independence) return 0.0;
  validate(c);
  double ll = 0.0;
  if (c.family == Family::student_t) {
    for (std::size_t i = 0; i < u.size(); ++i) ll += t_log_density(c.theta, c.nu, u[i], v[i]);
    return ll;
  }
  for (std::size_t i = 0; i < u.size(); ++i) ll += log_density(c, u[i], v[i]);
  return ll;
}

PairCopula fit_family(Family family, std::span<const double> u, std::span<const double> v, double empirical_tau) {
  require(u.size() == v.size(), "fit_family: length mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) require_open_unit(u[i], v[i]);
  PairCopula best = PairCopula::make(family, 0.0);
  best.n_obs = u.size();

  if (family == Family::independence) {
    best.loglik = 0.0;
    best.aic = 0.0;
    return best;
  }

  const auto bounds = parameter_bounds(family);
  const double tau0 = std::clamp(empirical_tau, -0.95, 0.95);

  if (family == Family::student_t) {
    // Profile likelihood: Brent over log(nu), inner Brent over rho with the
    // t-scale quantiles computed once per nu.
    std::vector<double> x(u.size()), y(u.size());
    auto profile = [&](double log_nu, double* rho_out) {
      const double nu = std::exp(log_nu);
      for (std::size_t i = 0; i < u.size(); ++i) {
        x[i] = numeric::student_t_quantile(u[i], nu);
        y[i] = numeric::student_t_quantile(v[i], nu);
      }
      auto negll = [&](double rho) {
        double ll = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) ll += t_log_density_xy(x[i], y[i], rho, nu);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
      };
      const double rho0 = std::clamp(std::sin(numeric::kPi * tau0 / 2.0), bounds.lo, bounds.hi);
      auto r = numeric::minimize_bounded(negll, bounds.lo, bounds.hi);
      const double f0 = negll(rho0);
      if (f0 < r.fx) r = {rho0, f0};
      if (rho_out) *rho_out = r.x;
      return r.fx;
    };
    const auto outer = numeric::minimize_bounded([&](double ln) { return profile(ln, nullptr); }, std::log(kNuMin),
                                                 std::log(kNuMax), 60);
    double rho = 0.0;
    const double f = profile(outer.x, &rho);
    best.theta = rho;
    best.nu = std::exp(outer.x);
    best.loglik = -f;
  } else {
    auto negll = [&](double th) {
      PairCopula c = PairCopula::make(family, th);
      if (family == Family::frank && std::abs(th) < kFrankZero) return 0.0;
      double ll = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        switch (family) {
          case Family::clayton: ll += clayton_log_density(th, u[i], v[i]); break;
          case Family::gumbel: ll += gumbel_log_density(th, u[i], v[i]); break;
          case Family::frank: ll += frank_log_density(th, u[i], v[i]); break;
          case Family::joe: ll += joe_log_density(th, u[i], v[i]); break;
          default: ll += log_density(c, u[i], v[i]); break;
        }
      }
      return std::isfinite(ll) ? -ll : std::numeric_limits<double>::max();
    };
    double init = bounds.lo;
    try {
      init = std::clamp(parameter_from_tau(family, tau0), bounds.lo, bounds.hi);
    } catch (const DomainError&) {
      init = family == Family::frank ? (tau0 >= 0.0 ? 1e-3 : -1e-3) : bounds.lo;
    }
    auto r = numeric::minimize_bounded(negll, bounds.lo, bounds.hi);
    const double f0 = negll(init);
    if (f0 <= r.fx) r = {init, f0};
    best.theta = r.x;
    if (family == Family::frank && std::abs(best.theta) < kFrankZero) best.theta = kFrankZero;
    best.loglik = -r.fx;
  }
  best.aic = 2.0 * best.n_parameters() - 2.0 * best.loglik;
  return best;
}

PairCopula fit_pair(std::span<const double> u, std::span<const double> v, std::span<const Family> families,
                    const FitOptions& opts) {
  require(u.size() == v.size(), "fit_pair: length mismatch");
  if (u.size() < opts.min_obs) {
    throw_domain("fit_pair: need at least " + std::to_string(opts.min_obs) + " observations");
  }
  if (families.empty()) throw_domain("fit_pair: empty family set");

  if (opts.independence_pretest) {
    const auto test = independence_test(u, v, opts.alpha);
    if (!test.reject) {
      PairCopula c = PairCopula::independence();
      c.n_obs = u.size();
      return c;
    }
  }

  const double tau = numeric::kendall_tau(u, v);
  bool have = false;
  PairCopula best;
  for (Family f : families) {
    if (tau < 0.0 && is_archimedean(f) && f != Family::frank) continue;
    try {
      PairCopula c = fit_family(f, u, v, tau);
      if (!std::isfinite(c.aic)) continue;
      if (!have || c.aic < best.aic) {
        best = c;
        have = true;
      }
    } catch (const DomainError&) {
      // family could not be fitted; try the rest
    }
  }
  if (!have) throw_domain("fit_pair: all candidate families failed to fit");
  return best;
}

IndependenceTestResult independence_test(std::span<const double> u, std::span<const double> v, double alpha) {
  require(u.size() == v.size(), "independence_test: length mismatch");
  require(u.size() >= 30, "independence_test: need at least 30 observations");
  IndependenceTestResult r;
  r.tau = numeric::kendall_tau(u, v);
  const double n = static_cast<double>(u.size());
  r.statistic = std::sqrt(9.0 * n * (n - 1.0) / (2.0 * (2.0 * n + 5.0))) * r.tau;
  r.p_value = 2.0 * numeric::normal_cdf(-std::abs(r.statistic));
  r.reject = r.p_value < alpha;
  return r;
}

}  // namespace cvhar::copula
