#include "cvhar/vine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cvhar/error.hpp"
#include "cvhar/numeric.hpp"

namespace cvhar::vine {

namespace {

using copula::h_function;
using copula::h_inverse;

std::vector<double> column(const margins::UniformSample& u, std::size_t j) {
  std::vector<double> out;
  out.reserve(u.size());
  for (const auto& row : u) out.push_back(row[j]);
  return out;
}

// open-interval uniform from 53 random bits
double open_uniform(std::mt19937_64& rng) {
  const auto bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(Edge edge) {
  switch (edge) {
    case Edge::e12: return "12";
    case Edge::e13: return "13";
    case Edge::e14: return "14";
    case Edge::e23_1: return "23|1";
    case Edge::e24_1: return "24|1";
    case Edge::e34_12: return "34|12";
  }
  return "?";
}

Edge edge_from_string(std::string_view text) {
  for (Edge e : kEdges) {
    if (to_string(e) == text) return e;
  }
  throw ConfigError("unknown vine edge '" + std::string(text) + "'");
}

int tree_of(Edge edge) {
  switch (edge) {
    case Edge::e12:
    case Edge::e13:
    case Edge::e14: return 1;
    case Edge::e23_1:
    case Edge::e24_1: return 2;
    case Edge::e34_12: return 3;
  }
  return 0;
}

CVineModel CVineModel::independence() {
  CVineModel m;
  m.family_set = "custom";
  return m;
}

CVineModel fit_cvine(const margins::UniformSample& u, copula::FamilySet set, const copula::FitOptions& opts) {
  const auto families = copula::families_of(set);
  CVineModel m = fit_cvine(u, families, opts);
  m.family_set = std::string(copula::to_string(set));
  return m;
}

CVineModel fit_cvine(const margins::UniformSample& u, std::span<const copula::Family> families,
                     const copula::FitOptions& opts) {
  if (u.size() < opts.min_obs) {
    throw_domain("fit_cvine: need at least " + std::to_string(opts.min_obs) + " observations");
  }
  for (const auto& row : u) {
    for (double x : row) {
      if (!(x > 0.0 && x < 1.0)) throw_domain("fit_cvine: uniforms must lie in (0,1)");
    }
  }
  const std::size_t n = u.size();
  const auto u1 = column(u, 0);
  const auto u2 = column(u, 1);
  const auto u3 = column(u, 2);
  const auto u4 = column(u, 3);

  CVineModel m;
  m.family_set = "custom";
  m.n_obs = n;

  // tree 1
  m[Edge::e12] = copula::fit_pair(u2, u1, families, opts);
  m[Edge::e13] = copula::fit_pair(u3, u1, families, opts);
  m[Edge::e14] = copula::fit_pair(u4, u1, families, opts);

  std::vector<double> u2_1(n), u3_1(n), u4_1(n);
  for (std::size_t i = 0; i < n; ++i) {
    u2_1[i] = h_function(m[Edge::e12], u2[i], u1[i]);
    u3_1[i] = h_function(m[Edge::e13], u3[i], u1[i]);
    u4_1[i] = h_function(m[Edge::e14], u4[i], u1[i]);
  }

  // tree 2
  m[Edge::e23_1] = copula::fit_pair(u3_1, u2_1, families, opts);
  m[Edge::e24_1] = copula::fit_pair(u4_1, u2_1, families, opts);

  std::vector<double> u3_12(n), u4_12(n);
  for (std::size_t i = 0; i < n; ++i) {
    u3_12[i] = h_function(m[Edge::e23_1], u3_1[i], u2_1[i]);
    u4_12[i] = h_function(m[Edge::e24_1], u4_1[i], u2_1[i]);
  }

  // tree 3
  m[Edge::e34_12] = copula::fit_pair(u4_12, u3_12, families, opts);

  m.total_loglik = 0.0;
  for (const auto& c : m.edges) m.total_loglik += c.loglik;
  return m;
}

double log_likelihood(const CVineModel& model, const margins::UniformSample& u) {
  double ll = 0.0;
  for (const auto& row : u) {
    const double u1 = row[0], u2 = row[1], u3 = row[2], u4 = row[3];
    ll += copula::log_density(model[Edge::e12], u2, u1);
    ll += copula::log_density(model[Edge::e13], u3, u1);
    ll += copula::log_density(model[Edge::e14], u4, u1);
    const double u2_1 = h_function(model[Edge::e12], u2, u1);
    const double u3_1 = h_function(model[Edge::e13], u3, u1);
    const double u4_1 = h_function(model[Edge::e14], u4, u1);
    ll += copula::log_density(model[Edge::e23_1], u3_1, u2_1);
    ll += copula::log_density(model[Edge::e24_1], u4_1, u2_1);
    const double u3_12 = h_function(model[Edge::e23_1], u3_1, u2_1);
    const double u4_12 = h_function(model[Edge::e24_1], u4_1, u2_1);
    ll += copula::log_density(model[Edge::e34_12], u4_12, u3_12);
  }
  return ll;
}

ConditioningState prepare_conditioning(const CVineModel& model, double u1, double u2, double u3) {
  ConditioningState s;
  s.u1 = u1;
  s.u2_1 = h_function(model[Edge::e12], u2, u1);
  const double u3_1 = h_function(model[Edge::e13], u3, u1);
  s.u3_12 = h_function(model[Edge::e23_1], u3_1, s.u2_1);
  return s;
}

double conditional_cdf_uniform(const CVineModel& model, const ConditioningState& s, double u4) {
  const double a = h_function(model[Edge::e14], u4, s.u1);
  const double b = h_function(model[Edge::e24_1], a, s.u2_1);
  return h_function(model[Edge::e34_12], b, s.u3_12);
}

double conditional_cdf(const CVineModel& model, const margins::ComponentMargins& margins, double x4,
                       const Conditioning& cond) {
  const auto s = prepare_conditioning(model, margins.monthly.cdf(cond.rk_m), margins.weekly.cdf(cond.rk_w),
                                      margins.daily.cdf(cond.rk_d));
  return conditional_cdf_uniform(model, s, margins.target.cdf(x4));
}

ExpectationResult conditional_expectation(const CVineModel& model, const margins::ComponentMargins& margins,
                                          const Conditioning& cond, const ExpectationOptions& opts) {
  const margins::Margin& target = margins.target;
  if (target.lower_tail_mass() > opts.max_lower_tail) {
    throw_domain("conditional_expectation: target margin places mass below zero");
  }
  const auto s = prepare_conditioning(model, margins.monthly.cdf(cond.rk_m), margins.weekly.cdf(cond.rk_w),
                                      margins.daily.cdf(cond.rk_d));
  auto survival = [&](double x) { return 1.0 - conditional_cdf_uniform(model, s, target.cdf(x)); };

  ExpectationResult out;
  out.upper_limit = target.quantile(1.0 - opts.upper_tail);

  const auto steps = target.step_points();
  if (!steps.empty()) {
    // F(.|cond) is constant between consecutive support points: exact sum.
    double prev = 0.0;
    double level = survival(steps.front() * 0.5);
    double total = 0.0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const double x = steps[i];
      if (x == prev) continue;
      total += level * (x - prev);
      level = survival(x);
      prev = x;
    }
    out.value = total;
    out.tail_mass = level;
    out.panels = static_cast<int>(steps.size());
  } else {
    // Break [0, U] at conditional quantiles of the target so each panel
    // sequence sees a bounded change in the survival function, however
    // concentrated the conditional law is relative to the margin.
    static constexpr double kLevels[] = {1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1,
                                         0.25, 0.5,  0.75, 0.9,  0.95, 0.99, 0.999,
                                         1.0 - 1e-4, 1.0 - 1e-6, 1.0 - 1e-9};
    std::vector<double> cuts{0.0};
    for (const double p : kLevels) {
      const double x = target.quantile(sample_conditional_uniform(model, s, p));
      if (x > cuts.back() && x < out.upper_limit) cuts.push_back(x);
    }
    cuts.push_back(out.upper_limit);
    const double median = target.quantile(sample_conditional_uniform(model, s, 0.5));
    const double scale = median > 0.0 ? median : out.upper_limit;

    numeric::QuadratureOptions q;
    q.rel_tol = opts.rel_tol;
    q.abs_tol = opts.rel_tol * scale / static_cast<double>(cuts.size());
    q.initial_panels = opts.initial_panels;
    q.max_panels = opts.max_panels;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      const auto r = numeric::integrate_gauss_legendre(survival, cuts[i - 1], cuts[i], q);
      if (!r.converged) throw_domain("conditional_expectation: quadrature did not converge");
      out.value += r.value;
      out.error_estimate += r.error_estimate;
      out.panels += r.panels;
    }
    out.tail_mass = survival(out.upper_limit);
  }
  if (!(out.value > 0.0) || !std::isfinite(out.value)) {
    throw_domain("conditional_expectation: non-positive integral");
  }
  return out;
}

double sample_conditional_uniform(const CVineModel& model, const ConditioningState& s, double w) {
  const double b = h_inverse(model[Edge::e34_12], w, s.u3_12);
  const double a = h_inverse(model[Edge::e24_1], b, s.u2_1);
  return h_inverse(model[Edge::e14], a, s.u1);
}

margins::UniformSample simulate_cvine(const CVineModel& model, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  margins::UniformSample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w1 = open_uniform(rng);
    const double w2 = open_uniform(rng);
    const double w3 = open_uniform(rng);
    const double w4 = open_uniform(rng);

    const double u1 = w1;
    const double u2 = h_inverse(model[Edge::e12], w2, u1);
    const double u2_1 = h_function(model[Edge::e12], u2, u1);
    const double u3 = h_inverse(model[Edge::e13], h_inverse(model[Edge::e23_1], w3, u2_1), u1);

    ConditioningState s;
    s.u1 = u1;
    s.u2_1 = u2_1;
    s.u3_12 = h_function(model[Edge::e23_1], h_function(model[Edge::e13], u3, u1), u2_1);
    const double u4 = sample_conditional_uniform(model, s, w4);
    out.push_back({u1, u2, u3, u4});
  }
  return out;
}

}  // namespace cvhar::vine
