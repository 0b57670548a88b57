#include <gtest/gtest.h>

#include <cmath>

#include "cvhar/copulas.hpp"
#include "cvhar/error.hpp"
#include "cvhar/synthetic.hpp"

using namespace cvhar;
using namespace cvhar::copula;

namespace {

std::vector<PairCopula> samples() {
  return {PairCopula::make(Family::clayton, 2.0), PairCopula::make(Family::gumbel, 1.8),
          PairCopula::make(Family::frank, 5.0),   PairCopula::make(Family::joe, 2.2),
          PairCopula::make(Family::gaussian, 0.6), PairCopula::make(Family::student_t, 0.5, 6.0)};
}

void split(const std::vector<std::array<double, 2>>& p, std::vector<double>& u, std::vector<double>& v) {
  u.clear();
  v.clear();
  for (const auto& r : p) {
    u.push_back(r[0]);
    v.push_back(r[1]);
  }
}

}  // namespace

TEST(Cdf, ClosedForms) {
  EXPECT_DOUBLE_EQ(cdf(PairCopula::independence(), 0.3, 0.5), 0.15);
  EXPECT_NEAR(cdf(PairCopula::make(Family::clayton, 2.0), 0.5, 0.5), std::pow(7.0, -0.5), 1e-14);
}

TEST(Cdf, UniformMarginsAndFrechetBounds) {
  for (const auto& c : samples()) {
    for (double u : {0.1, 0.45, 0.9}) {
      EXPECT_NEAR(cdf(c, u, 1.0), u, 1e-9) << to_string(c.family);
      EXPECT_NEAR(cdf(c, 1.0, u), u, 1e-9) << to_string(c.family);
      for (double v : {0.2, 0.7}) {
        const double x = cdf(c, u, v);
        EXPECT_GE(x, std::max(u + v - 1.0, 0.0) - 1e-12);
        EXPECT_LE(x, std::min(u, v) + 1e-12);
      }
    }
  }
}

TEST(Density, IndependenceAndFrankLimit) {
  EXPECT_EQ(density(PairCopula::independence(), 0.2, 0.9), 1.0);
  EXPECT_NEAR(density(PairCopula::make(Family::frank, 1e-8), 0.3, 0.8), 1.0, 1e-4);
}

TEST(Density, GumbelIntegratesToOne) {
  const auto c = PairCopula::make(Family::gumbel, 2.0);
  const int n = 400;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) total += density(c, (i + 0.5) / n, (j + 0.5) / n);
  }
  EXPECT_NEAR(total / (n * n), 1.0, 1e-3);
}

TEST(Density, InvalidParameter) {
  EXPECT_THROW(density(PairCopula::make(Family::clayton, -1.0), 0.5, 0.5), DomainError);
  EXPECT_THROW(validate(PairCopula::make(Family::gumbel, 0.9)), DomainError);
  EXPECT_THROW(validate(PairCopula::make(Family::student_t, 0.5, 1.5)), DomainError);
}

TEST(HFunction, ClaytonClosedForm) {
  const auto c = PairCopula::make(Family::clayton, 2.0);
  const double expected = 8.0 * std::pow(7.0, -1.5);
  EXPECT_NEAR(h_function(c, 0.5, 0.5), expected, 1e-14);
  const double d = 1e-6;
  EXPECT_NEAR((cdf(c, 0.5, 0.5 + d) - cdf(c, 0.5, 0.5 - d)) / (2 * d), expected, 1e-8);
}

TEST(HFunction, IndependenceAndMonotone) {
  EXPECT_DOUBLE_EQ(h_function(PairCopula::independence(), 0.37, 0.9), 0.37);
  for (const auto& c : samples()) {
    for (double v : {0.05, 0.5, 0.95}) {
      double prev = 0.0;
      for (int i = 1; i < 100; ++i) {
        const double h = h_function(c, i / 100.0, v);
        EXPECT_GE(h, prev - 1e-12) << to_string(c.family);
        prev = h;
      }
    }
  }
}

TEST(HFunction, FiniteDifferenceTracksExact) {
  for (const auto& c : {PairCopula::make(Family::gaussian, 0.6), PairCopula::make(Family::student_t, 0.5, 6.0)}) {
    for (double u : {0.2, 0.5, 0.8}) {
      for (double v : {0.2, 0.5, 0.8}) EXPECT_NEAR(h_function(c, u, v), h_function_exact(c, u, v), 2e-3);
    }
  }
}

TEST(HInverse, RoundTrip) {
  for (const auto& c : samples()) {
    for (double w : {0.01, 0.3, 0.7, 0.99}) {
      for (double v : {0.1, 0.5, 0.9}) {
        EXPECT_NEAR(h_function(c, h_inverse(c, w, v), v), w, 1e-8) << to_string(c.family);
      }
    }
  }
}

TEST(Tau, Maps) {
  EXPECT_DOUBLE_EQ(tau_from_parameter(Family::clayton, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(tau_from_parameter(Family::gaussian, 0.0), 0.0);
  EXPECT_NEAR(parameter_from_tau(Family::gumbel, 0.5), 2.0, 1e-12);
  for (auto f : {Family::clayton, Family::gumbel, Family::frank, Family::joe, Family::gaussian}) {
    EXPECT_NEAR(tau_from_parameter(f, parameter_from_tau(f, 0.4)), 0.4, 1e-8) << to_string(f);
  }
  EXPECT_THROW(parameter_from_tau(Family::clayton, -0.3), DomainError);
}

TEST(Tau, ClaytonMonteCarlo) {
  // tau = 4 E[C(U,V)] - 1
  synthetic::Rng rng(2);
  const auto c = PairCopula::make(Family::clayton, 2.0);
  const auto p = synthetic::copula_pairs(rng, c, 200000);
  double m = 0.0;
  for (const auto& r : p) m += cdf(c, r[0], r[1]);
  EXPECT_NEAR(4.0 * m / p.size() - 1.0, 0.5, 0.01);
}

TEST(Fit, ClaytonSelection) {
  synthetic::Rng rng(17);
  const auto all = families_of(FamilySet::AGT);
  int hits = 0;
  double mean_theta = 0.0;
  std::vector<double> u, v;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    split(synthetic::copula_pairs(rng, PairCopula::make(Family::clayton, 2.0), 2000), u, v);
    const auto fit = fit_pair(u, v, all);
    if (fit.family == Family::clayton) {
      ++hits;
      mean_theta += fit.theta;
    }
  }
  EXPECT_GE(hits, 18);
  EXPECT_NEAR(mean_theta / hits, 2.0, 0.25);
}

TEST(Fit, IndependentUniforms) {
  synthetic::Rng rng(4);
  std::vector<double> u, v;
  split(synthetic::copula_pairs(rng, PairCopula::independence(), 2000), u, v);
  std::vector<Family> set = families_of(FamilySet::AGT);
  set.push_back(Family::independence);
  const auto fit = fit_pair(u, v, set);
  EXPECT_TRUE(fit.family == Family::independence || std::abs(tau_from_parameter(fit.family, fit.theta)) < 0.03);
}

TEST(Fit, TooFewObservations) {
  const std::vector<double> u{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  EXPECT_THROW(fit_pair(u, u, families_of(FamilySet::A)), DomainError);
}

TEST(Fit, AicMatchesLoglik) {
  synthetic::Rng rng(8);
  std::vector<double> u, v;
  split(synthetic::copula_pairs(rng, PairCopula::make(Family::student_t, 0.5, 5.0), 1000), u, v);
  const auto fit = fit_pair(u, v, families_of(FamilySet::AGT));
  EXPECT_NEAR(fit.loglik, log_likelihood(fit, u, v), 1e-8);
  EXPECT_NEAR(fit.aic, 2.0 * fit.n_parameters() - 2.0 * fit.loglik, 1e-9);
}

TEST(IndependenceTest, Comonotone) {
  std::vector<double> u;
  for (int i = 1; i <= 50; ++i) u.push_back(i / 51.0);
  const auto t = independence_test(u, u);
  EXPECT_DOUBLE_EQ(t.tau, 1.0);
  EXPECT_LT(t.p_value, 1e-10);
  EXPECT_TRUE(t.reject);
  const std::vector<double> five{0.1, 0.2, 0.3, 0.4, 0.5};
  EXPECT_THROW(independence_test(five, five), DomainError);
}

TEST(IndependenceTest, Size) {
  synthetic::Rng rng(12);
  int rejections = 0;
  const int reps = 1000;
  std::vector<double> u(1000), v(1000);
  for (int r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] = synthetic::open_uniform(rng);
      v[i] = synthetic::open_uniform(rng);
    }
    rejections += independence_test(u, v).reject;
  }
  EXPECT_NEAR(rejections / double(reps), 0.05, 0.02);
}

TEST(Names, RoundTrip) {
  for (auto f : {Family::independence, Family::gaussian, Family::student_t, Family::clayton, Family::gumbel,
                 Family::frank, Family::joe}) {
    EXPECT_EQ(family_from_string(to_string(f)), f);
  }
  EXPECT_EQ(family_set_from_string("AGT"), FamilySet::AGT);
  EXPECT_EQ(families_of(FamilySet::A).size(), 4u);
  EXPECT_EQ(families_of(FamilySet::AGT).size(), 6u);
}
