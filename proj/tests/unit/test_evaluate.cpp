#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cvhar/error.hpp"
#include "cvhar/evaluate.hpp"
#include "cvhar/synthetic.hpp"

using namespace cvhar;
using namespace cvhar::eval;

namespace {

realized::RkComponentSeries har_rows(std::size_t days, std::uint64_t seed) {
  synthetic::Rng rng(seed);
  const auto rk = synthetic::linear_har_series(rng, days, {}, 0.1, 0.5);
  const auto dates =
      synthetic::business_days({std::chrono::year{2015}, std::chrono::month{1}, std::chrono::day{1}}, rk.size());
  return realized::build_components(rk, dates);
}

SchemeConfig quick(Scheme s, std::size_t w) {
  SchemeConfig c;
  c.scheme = s;
  c.window = w;
  c.family_set = copula::FamilySet::A;
  return c;
}

}  // namespace

TEST(Loss, PerfectForecasts) {
  const std::vector<double> y{1.0, 2.0, 1.5, 3.0};
  const auto m = loss_measures(y, y);
  EXPECT_EQ(m.mse, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_EQ(m.mad, 0.0);
  EXPECT_EQ(m.mape, 0.0);
  EXPECT_EQ(m.qlik, 0.0);
  EXPECT_EQ(m.mda, 1.0);
}

TEST(Loss, HandArithmetic) {
  const std::vector<double> y{1.0, 2.0}, f{1.0, 1.0};
  const auto m = loss_measures(y, f);
  EXPECT_DOUBLE_EQ(m.mse, 0.5);
  EXPECT_DOUBLE_EQ(m.mae, 0.5);
  EXPECT_DOUBLE_EQ(m.mape, 0.25);
}

TEST(Loss, QlikAtRatioE) {
  const std::vector<double> y{std::exp(1.0), 2 * std::exp(1.0)}, f{1.0, 2.0};
  EXPECT_NEAR(loss_measures(y, f).qlik, std::exp(1.0) - 2.0, 1e-14);
  EXPECT_NEAR(loss(LossKind::qlik, std::exp(1.0), 1.0), std::exp(1.0) - 2.0, 1e-14);
  EXPECT_THROW(loss(LossKind::qlik, 1.0, 0.0), DomainError);
}

TEST(Loss, QlikSkipsNonPositiveForecasts) {
  const std::vector<double> y{1.0, 2.0, 3.0}, f{1.0, -1.0, 3.0};
  const auto m = loss_measures(y, f);
  EXPECT_EQ(m.qlik_excluded, 1u);
  EXPECT_EQ(m.qlik, 0.0);
}

TEST(Loss, BadInput) {
  const std::vector<double> one{1.0}, two{1.0, 2.0}, neg{1.0, -2.0};
  EXPECT_THROW(loss_measures(one, one), DomainError);
  EXPECT_THROW(loss_measures(two, one), DomainError);
  EXPECT_THROW(loss_measures(neg, two), DomainError);
}

TEST(Loss, PooledMatchesSingle) {
  const std::vector<double> y{1.0, 2.0, 1.5}, f{1.1, 1.8, 1.4}, p{0.9, 1.0, 2.0};
  const SeriesView v{y, f, p};
  const auto pooled = pooled_measures(std::span<const SeriesView>(&v, 1));
  const auto single = loss_measures(y, f, p);
  EXPECT_DOUBLE_EQ(pooled.mse, single.mse);
  EXPECT_DOUBLE_EQ(pooled.mase, single.mase);
  EXPECT_DOUBLE_EQ(pooled.mda, single.mda);
}

TEST(DieboldMariano, Degenerate) {
  const std::vector<double> a(50, 1.0);
  EXPECT_THROW(dm_test(a, a), DomainError);
  EXPECT_THROW(cpa_test(a, a), DomainError);
}

TEST(DieboldMariano, StrongSignal) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 0.1);
  std::vector<double> a(200), b(200, 0.0);
  for (auto& x : a) x = 1.0 + z(rng);
  const auto r = dm_test(a, b);
  EXPECT_GT(r.statistic, 50.0);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_LT(dm_test(a, b, 4).p_value, 1e-6);
}

TEST(Cpa, Power) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> a(500), b(500, 0.0);
  for (auto& x : a) x = 1.0 + z(rng);
  const auto r = cpa_test(a, b);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_EQ(r.n, 499u);
}

TEST(Stars, Thresholds) {
  EXPECT_EQ(significance_stars(0.2), "");
  EXPECT_EQ(significance_stars(0.04), "*");
  EXPECT_EQ(significance_stars(0.005), "**");
  EXPECT_EQ(significance_stars(0.0001), "***");
}

TEST(Scheme, ValidateWindows) {
  auto c = quick(Scheme::RW, 1250);
  EXPECT_THROW(validate(c), ConfigError);
  c.allow_any_window = true;
  EXPECT_NO_THROW(validate(c));
  EXPECT_NO_THROW(validate(quick(Scheme::FW, 1250)));
}

TEST(Scheme, RollingRecordCount) {
  auto rows = har_rows(532, 1);
  ASSERT_EQ(rows.size(), 510u);
  const auto r = run_scheme(rows, quick(Scheme::RW, 500));
  ASSERT_EQ(r.records.size(), 10u);
  EXPECT_EQ(r.records.front().date, rows[500].date);
  EXPECT_EQ(r.records.front().y, rows[500].target);
  EXPECT_EQ(r.records.front().y_prev, rows[500].rk_d);
}

TEST(Scheme, FixedWindowPanelsAndOracle) {
  const auto rows = har_rows(1022, 2);
  const auto r = run_scheme(rows, quick(Scheme::FW, 250));
  ASSERT_TRUE(r.report.in_sample.has_value());
  EXPECT_EQ(r.report.out_of_sample.har.n, rows.size() - 250);
  // IG(0.1, 0.5) innovations have variance mu^3 / lambda = 0.002
  EXPECT_NEAR(r.report.out_of_sample.har.mse, 0.002, 0.0002);
  // DM / CPA are reported for the IW and RW schemes only
  EXPECT_TRUE(r.report.tests.empty());
}

TEST(Scheme, ConstantSeriesFails) {
  const auto dates =
      synthetic::business_days({std::chrono::year{2015}, std::chrono::month{1}, std::chrono::day{1}}, 300);
  const auto rows = realized::build_components(std::vector<double>(300, 1.0), dates);
  EXPECT_THROW(run_scheme(rows, quick(Scheme::FW, 250)), DomainError);
}

TEST(Scheme, TooShort) {
  const auto rows = har_rows(260, 3);
  EXPECT_THROW(run_scheme(rows, quick(Scheme::RW, 250)), DomainError);
}

TEST(Scheme, AgtNestsA) {
  const auto rows = har_rows(300, 4);
  const std::span<const realized::ComponentRow> w(rows.data(), 250);
  auto a = quick(Scheme::FW, 250);
  auto agt = a;
  agt.family_set = copula::FamilySet::AGT;
  EXPECT_GE(fit_models(w, agt).vine.total_loglik, fit_models(w, a).vine.total_loglik - 1e-9);
}

TEST(Scheme, Deterministic) {
  const auto rows = har_rows(300, 5);
  const auto a = run_scheme(rows, quick(Scheme::IW, 250));
  const auto b = run_scheme(rows, quick(Scheme::IW, 250));
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].yhat_cvhar, b.records[i].yhat_cvhar);
}
