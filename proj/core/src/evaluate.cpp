#include "cvhar/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cvhar/error.hpp"
#include "cvhar/numeric.hpp"

namespace cvhar::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Accumulator {
  std::vector<double> abs_err;
  double sq = 0.0;
  double ab = 0.0;
  double ape = 0.0;
  double qlik = 0.0;
  std::size_t qlik_n = 0;
  std::size_t qlik_excluded = 0;

  void add(double y, double yhat) {
    if (!(y > 0.0)) throw_domain("loss_measures: realized values must be positive");
    const double e = y - yhat;
    sq += e * e;
    ab += std::abs(e);
    ape += std::abs(e) / y;
    abs_err.push_back(std::abs(e));
    if (yhat > 0.0) {
      qlik += loss(LossKind::qlik, y, yhat);
      ++qlik_n;
    } else {
      ++qlik_excluded;
    }
  }

  void finish(LossMeasures& m) const {
    const double n = static_cast<double>(abs_err.size());
    m.n = abs_err.size();
    m.mse = sq / n;
    m.mae = ab / n;
    m.mape = ape / n;
    m.mad = numeric::median(abs_err);
    m.qlik = qlik_n > 0 ? qlik / static_cast<double>(qlik_n) : kNaN;
    m.qlik_excluded = qlik_excluded;
  }
};

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// MASE and MDA for one series.
void lagged_measures(std::span<const double> y, std::span<const double> yhat, std::span<const double> y_prev,
                     LossMeasures& m) {
  const std::size_t n = y.size();
  double naive = 0.0;
  for (std::size_t t = 1; t < n; ++t) naive += std::abs(y[t] - y[t - 1]);
  naive /= static_cast<double>(n - 1);
  double mae = 0.0;
  for (std::size_t t = 0; t < n; ++t) mae += std::abs(yhat[t] - y[t]);
  mae /= static_cast<double>(n);
  m.mase = naive > 0.0 ? mae / naive : kNaN;

  std::size_t hits = 0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    double prev;
    if (!y_prev.empty()) {
      prev = y_prev[t];
    } else if (t > 0) {
      prev = y[t - 1];
    } else {
      continue;
    }
    hits += sign(y[t] - prev) == sign(yhat[t] - prev);
    ++count;
  }
  m.mda = static_cast<double>(hits) / static_cast<double>(count);
}

void check_lengths(const SeriesView& s) {
  if (s.y.size() != s.yhat.size()) throw_domain("loss_measures: length mismatch");
  if (!s.y_prev.empty() && s.y_prev.size() != s.y.size()) throw_domain("loss_measures: y_prev length mismatch");
  if (s.y.size() < 2) throw_domain("loss_measures: need at least 2 observations");
}

std::vector<double> differential(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw_domain("loss differential: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double safe_ratio(double num, double den) { return den != 0.0 ? num / den : kNaN; }

}  // namespace

LossMeasures loss_measures(std::span<const double> y, std::span<const double> yhat, std::span<const double> y_prev) {
  const SeriesView s{y, yhat, y_prev};
  return pooled_measures(std::span<const SeriesView>(&s, 1));
}

LossMeasures pooled_measures(std::span<const SeriesView> series) {
  if (series.empty()) throw_domain("pooled_measures: no series");
  Accumulator acc;
  double mase = 0.0;
  double mda = 0.0;
  for (const auto& s : series) {
    check_lengths(s);
    for (std::size_t t = 0; t < s.y.size(); ++t) acc.add(s.y[t], s.yhat[t]);
    LossMeasures one;
    lagged_measures(s.y, s.yhat, s.y_prev, one);
    mase += one.mase;
    mda += one.mda;
  }
  LossMeasures m;
  acc.finish(m);
  m.mase = mase / static_cast<double>(series.size());
  m.mda = mda / static_cast<double>(series.size());
  return m;
}

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::squared: return "MSE";
    case LossKind::absolute: return "MAE";
    case LossKind::qlik: return "QLIK";
  }
  return "?";
}

double loss(LossKind kind, double y, double yhat) {
  switch (kind) {
    case LossKind::squared: return (y - yhat) * (y - yhat);
    case LossKind::absolute: return std::abs(y - yhat);
    case LossKind::qlik: {
      if (!(yhat > 0.0) || !(y > 0.0)) throw_domain("qlik loss: requires positive y and forecast");
      const double r = y / yhat;
      return r - std::log(r) - 1.0;
    }
  }
  return 0.0;
}

TestResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b, int lags) {
  const auto d = differential(loss_a, loss_b);
  const std::size_t n = d.size();
  if (n < 30) throw_domain("dm_test: need at least 30 observations");
  if (lags < 0) throw_domain("dm_test: negative lag count");
  const double mean = numeric::mean(d);
  auto autocov = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t t = k; t < n; ++t) s += (d[t] - mean) * (d[t - k] - mean);
    return s / static_cast<double>(n);
  };
  double var = autocov(0);
  for (int k = 1; k <= lags; ++k) {
    const double w = 1.0 - static_cast<double>(k) / (lags + 1.0);
    var += 2.0 * w * autocov(static_cast<std::size_t>(k));
  }
  if (!(var > 1e-300)) throw_domain("dm_test: zero-variance loss differential (identical forecasts)");
  TestResult r;
  r.n = n;
  r.statistic = mean / std::sqrt(var / static_cast<double>(n));
  r.p_value = 2.0 * numeric::normal_cdf(-std::abs(r.statistic));
  return r;
}

TestResult cpa_test(std::span<const double> loss_a, std::span<const double> loss_b) {
  const auto d = differential(loss_a, loss_b);
  if (d.size() < 50) throw_domain("cpa_test: need at least 50 observations");
  bool degenerate = true;
  for (double x : d) degenerate = degenerate && x == d.front();
  if (degenerate) throw_domain("cpa_test: degenerate loss differential");

  const std::size_t m = d.size() - 1;
  Eigen::Vector2d zbar = Eigen::Vector2d::Zero();
  Eigen::Matrix2d omega = Eigen::Matrix2d::Zero();
  for (std::size_t t = 1; t < d.size(); ++t) {
    const Eigen::Vector2d z(d[t], d[t - 1] * d[t]);
    zbar += z;
    omega += z * z.transpose();
  }
  zbar /= static_cast<double>(m);
  omega /= static_cast<double>(m);
  Eigen::LDLT<Eigen::Matrix2d> ldlt(omega);
  if (ldlt.info() != Eigen::Success || !(std::abs(omega.determinant()) > 1e-14 * omega.squaredNorm())) {
    throw_domain("cpa_test: singular moment matrix");
  }
  TestResult r;
  r.n = m;
  r.statistic = static_cast<double>(m) * zbar.dot(ldlt.solve(zbar));
  r.p_value = numeric::chi_squared_sf(r.statistic, 2.0);
  return r;
}

std::string_view significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::FW: return "FW";
    case Scheme::IW: return "IW";
    case Scheme::RW: return "RW";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view text) {
  if (text == "FW" || text == "fw") return Scheme::FW;
  if (text == "IW" || text == "iw") return Scheme::IW;
  if (text == "RW" || text == "rw") return Scheme::RW;
  throw ConfigError("unknown scheme '" + std::string(text) + "' (expected FW, IW or RW)");
}

void validate(const SchemeConfig& cfg) {
  if (cfg.window < 30) throw ConfigError("scheme window must be at least 30");
  if (cfg.margin == margins::MarginKind::normal) throw ConfigError("margin kind 'normal' is not selectable");
  if (cfg.dm_lags < 0) throw ConfigError("dm_lags must be non-negative");
  if (cfg.allow_any_window) return;
  const std::size_t w = cfg.window;
  const bool grid = w == 250 || w == 500 || w == 750 || (cfg.scheme == Scheme::FW && w == 1250);
  if (!grid) {
    throw ConfigError("window " + std::to_string(w) + " is outside the grid for " +
                      std::string(to_string(cfg.scheme)) + " (set allow_any_window to override)");
  }
}

LossMeasures ratio_of(const LossMeasures& cvhar, const LossMeasures& har) {
  LossMeasures r;
  r.mse = safe_ratio(cvhar.mse, har.mse);
  r.mae = safe_ratio(cvhar.mae, har.mae);
  r.mad = safe_ratio(cvhar.mad, har.mad);
  r.mase = safe_ratio(cvhar.mase, har.mase);
  r.mape = safe_ratio(cvhar.mape, har.mape);
  r.mda = safe_ratio(cvhar.mda, har.mda);
  r.qlik = safe_ratio(cvhar.qlik, har.qlik);
  r.n = cvhar.n;
  return r;
}

namespace {

struct Columns {
  std::vector<double> y, y_prev, har, cvhar;
};

Columns columns_of(std::span<const ForecastRecord> records, bool in_sample) {
  Columns c;
  for (const auto& r : records) {
    if (r.in_sample != in_sample) continue;
    c.y.push_back(r.y);
    c.y_prev.push_back(r.y_prev);
    c.har.push_back(r.yhat_har);
    c.cvhar.push_back(r.yhat_cvhar);
  }
  return c;
}

Panel panel_of(std::span<const Columns> cols) {
  std::vector<SeriesView> har, cv;
  for (const auto& c : cols) {
    har.push_back({c.y, c.har, c.y_prev});
    cv.push_back({c.y, c.cvhar, c.y_prev});
  }
  Panel p;
  p.har = pooled_measures(har);
  p.cvhar = pooled_measures(cv);
  p.ratio = ratio_of(p.cvhar, p.har);
  return p;
}

std::vector<TestRow> tests_of(std::span<const Columns> cols, Scheme scheme, int dm_lags) {
  std::vector<TestRow> rows;
  if (scheme == Scheme::FW) return rows;
  for (LossKind kind : {LossKind::squared, LossKind::absolute, LossKind::qlik}) {
    std::vector<double> la, lb;
    for (const auto& c : cols) {
      for (std::size_t t = 0; t < c.y.size(); ++t) {
        if (kind == LossKind::qlik && !(c.har[t] > 0.0)) continue;
        la.push_back(loss(kind, c.y[t], c.har[t]));
        lb.push_back(loss(kind, c.y[t], c.cvhar[t]));
      }
    }
    TestRow row;
    row.loss = kind;
    try {
      if (scheme == Scheme::RW) row.dm = dm_test(la, lb, dm_lags);
    } catch (const DomainError&) {
    }
    try {
      row.cpa = cpa_test(la, lb);
    } catch (const DomainError&) {
    }
    rows.push_back(row);
  }
  return rows;
}

EvalReport report_of(std::span<const std::vector<ForecastRecord>> per_instrument, Scheme scheme,
                     std::size_t window, int dm_lags) {
  EvalReport rep;
  rep.scheme = scheme;
  rep.window = window;
  std::vector<Columns> oos, ins;
  for (const auto& recs : per_instrument) {
    oos.push_back(columns_of(recs, false));
    auto in = columns_of(recs, true);
    if (!in.y.empty()) ins.push_back(std::move(in));
    for (const auto& r : recs) rep.har_negative_forecasts += r.har_negative;
  }
  rep.out_of_sample = panel_of(oos);
  if (!ins.empty()) rep.in_sample = panel_of(ins);
  rep.tests = tests_of(oos, scheme, dm_lags);
  return rep;
}

}  // namespace

EvalReport evaluate_records(std::span<const ForecastRecord> records, Scheme scheme, std::size_t window,
                            int dm_lags) {
  const std::vector<ForecastRecord> one(records.begin(), records.end());
  return report_of(std::span<const std::vector<ForecastRecord>>(&one, 1), scheme, window, dm_lags);
}

EvalReport aggregate_reports(std::span<const std::vector<ForecastRecord>> per_instrument, Scheme scheme,
                             std::size_t window, int dm_lags) {
  if (per_instrument.empty()) throw_domain("aggregate_reports: no instruments");
  return report_of(per_instrument, scheme, window, dm_lags);
}

FittedModels fit_models(std::span<const realized::ComponentRow> window, const SchemeConfig& cfg) {
  auto h = har::fit_har(window, cfg.har_options);
  auto m = margins::fit_component_margins(window, cfg.margin, cfg.margin_options);
  const auto u = margins::pit_transform(window, m);
  auto v = vine::fit_cvine(u, cfg.family_set, cfg.copula_options);
  return FittedModels{h, std::move(m), std::move(v)};
}

namespace {

ForecastRecord forecast_row(const FittedModels& f, const realized::ComponentRow& row, const SchemeConfig& cfg,
                            bool in_sample) {
  ForecastRecord r;
  r.date = row.date;
  r.y = row.target;
  r.y_prev = row.rk_d;
  const auto hf = har::har_forecast(f.har, row.rk_d, row.rk_w, row.rk_m);
  r.yhat_har = hf.value;
  r.har_negative = hf.negative;
  r.yhat_cvhar =
      vine::conditional_expectation(f.vine, f.margins, {row.rk_m, row.rk_w, row.rk_d}, cfg.expectation).value;
  r.in_sample = in_sample;
  r.scheme = cfg.scheme;
  r.window = cfg.window;
  return r;
}

}  // namespace

SchemeResult run_scheme(std::span<const realized::ComponentRow> series, const SchemeConfig& cfg) {
  validate(cfg);
  const std::size_t n = series.size();
  const std::size_t w = cfg.window;
  if (n <= w + 1) {
    throw_domain("run_scheme: series of " + std::to_string(n) + " rows is too short for window " +
                 std::to_string(w));
  }
  SchemeResult out;
  std::optional<FittedModels> fitted;
  if (cfg.scheme == Scheme::FW) {
    fitted = fit_models(series.subspan(0, w), cfg);
    for (std::size_t d = 0; d < w; ++d) out.records.push_back(forecast_row(*fitted, series[d], cfg, true));
  }
  for (std::size_t d = w; d < n; ++d) {
    if (cfg.scheme == Scheme::IW) {
      fitted = fit_models(series.subspan(0, d), cfg);
    } else if (cfg.scheme == Scheme::RW) {
      fitted = fit_models(series.subspan(d - w, w), cfg);
    }
    out.records.push_back(forecast_row(*fitted, series[d], cfg, false));
  }
  out.report = evaluate_records(out.records, cfg.scheme, w, cfg.dm_lags);
  out.report.margin = std::string(margins::to_string(cfg.margin));
  out.report.family_set = std::string(copula::to_string(cfg.family_set));
  out.report.last_vine_loglik = fitted->vine.total_loglik;
  out.last_vine = fitted->vine;
  out.last_har = fitted->har;
  return out;
}

}  // namespace cvhar::eval
