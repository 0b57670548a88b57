#pragma once

// Fixed 4-dimensional canonical vine over (rk_m, rk_w, rk_d, target).
//
//   tree 1: 12, 13, 14        (root: monthly)
//   tree 2: 23|1, 24|1        (root: weekly given monthly)
//   tree 3: 34|12
//
// The target (variable 4) is only ever conditioned on, never conditioning.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvhar/copulas.hpp"
#include "cvhar/margins.hpp"

namespace cvhar::vine {

enum class Edge { e12 = 0, e13, e14, e23_1, e24_1, e34_12 };

inline constexpr std::size_t kEdgeCount = 6;
inline constexpr std::array<Edge, kEdgeCount> kEdges{Edge::e12, Edge::e13, Edge::e14,
                                                     Edge::e23_1, Edge::e24_1, Edge::e34_12};

std::string_view to_string(Edge edge);
Edge edge_from_string(std::string_view text);
/// 1, 2 or 3.
int tree_of(Edge edge);

struct CVineModel {
  std::array<copula::PairCopula, kEdgeCount> edges{};
  std::string family_set = "A";  // "A", "AGT" or "custom"
  double total_loglik = 0.0;
  std::size_t n_obs = 0;

  copula::PairCopula& operator[](Edge e) { return edges[static_cast<std::size_t>(e)]; }
  const copula::PairCopula& operator[](Edge e) const { return edges[static_cast<std::size_t>(e)]; }

  static CVineModel independence();
};

/// Sequential tree-by-tree maximum likelihood with AIC family selection.
CVineModel fit_cvine(const margins::UniformSample& u, copula::FamilySet set,
                     const copula::FitOptions& opts = {});
CVineModel fit_cvine(const margins::UniformSample& u, std::span<const copula::Family> families,
                     const copula::FitOptions& opts = {});

/// Joint log-likelihood of the copula part on a uniform sample.
double log_likelihood(const CVineModel& model, const margins::UniformSample& u);

/// Conditioning values in original units.
struct Conditioning {
  double rk_m = 0.0;
  double rk_w = 0.0;
  double rk_d = 0.0;
};

/// Conditioning-side quantities shared by every evaluation of F(.|cond):
/// u1, h(u2|u1) and h(h(u3|u1) | h(u2|u1)).
struct ConditioningState {
  double u1 = 0.5;
  double u2_1 = 0.5;
  double u3_12 = 0.5;
};

ConditioningState prepare_conditioning(const CVineModel& model, double u1, double u2, double u3);

/// F(u4 | u1, u2, u3) on the copula scale.
double conditional_cdf_uniform(const CVineModel& model, const ConditioningState& state, double u4);

/// F(x4 | x1, x2, x3) through the fitted margins.
double conditional_cdf(const CVineModel& model, const margins::ComponentMargins& margins, double x4,
                       const Conditioning& cond);

struct ExpectationOptions {
  double rel_tol = 1e-6;
  // Upper integration limit is quantile(target margin, 1 - upper_tail).
  double upper_tail = 1e-7;
  int initial_panels = 4;
  int max_panels = 1 << 14;
  // Largest tolerated mass of the target margin below zero.
  double max_lower_tail = 1e-6;
};

struct ExpectationResult {
  double value = 0.0;
  double upper_limit = 0.0;
  // 1 - F(upper_limit | cond): mass beyond the integration range.
  double tail_mass = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// E[x4 | cond] = integral over (0, U) of 1 - F(x | cond). Step margins are
/// integrated exactly piece by piece; continuous margins by adaptive
/// composite Gauss-Legendre. Throws when the quadrature does not converge.
ExpectationResult conditional_expectation(const CVineModel& model, const margins::ComponentMargins& margins,
                                          const Conditioning& cond, const ExpectationOptions& opts = {});

/// C-vine sampling by inverting the h-function recursion. Test oracle only.
margins::UniformSample simulate_cvine(const CVineModel& model, std::size_t n, std::uint64_t seed);

/// Inverts F(.|u1,u2,u3) at w: a draw of u4 given the conditioning uniforms.
double sample_conditional_uniform(const CVineModel& model, const ConditioningState& state, double w);

}  // namespace cvhar::vine
