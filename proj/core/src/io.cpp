#include "cvhar/io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cvhar/error.hpp"

namespace cvhar::io {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& line, char delim = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw IoError(std::string("malformed ") + what + " value '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const char* what) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw IoError(std::string("malformed ") + what + " value '" + s + "'");
  return v;
}

// Header-indexed CSV reader.
class CsvTable {
 public:
  CsvTable(std::istream& in, std::initializer_list<const char*> required) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: missing header");
    const auto header = split(line);
    for (std::size_t i = 0; i < header.size(); ++i) index_[header[i]] = i;
    for (const char* name : required) {
      if (!index_.count(name)) throw IoError(std::string("csv: missing column '") + name + "'");
    }
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      rows_.push_back(split(line));
      if (rows_.back().size() != header.size()) throw IoError("csv: ragged row '" + line + "'");
    }
  }

  std::size_t size() const { return rows_.size(); }
  bool has(const char* col) const { return index_.count(col) > 0; }
  const std::string& at(std::size_t row, const char* col) const { return rows_[row][index_.at(col)]; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json measures_json(const eval::LossMeasures& m) {
  ordered_json j;
  j["MSE"] = number(m.mse);
  j["MAE"] = number(m.mae);
  j["MAD"] = number(m.mad);
  j["MASE"] = number(m.mase);
  j["MAPE"] = number(m.mape);
  j["QLIK"] = number(m.qlik);
  j["MDA"] = number(m.mda);
  j["n"] = m.n;
  j["qlik_excluded"] = m.qlik_excluded;
  return j;
}

ordered_json panel_json(const eval::Panel& p) {
  return ordered_json{{"HAR", measures_json(p.har)}, {"CV-HAR", measures_json(p.cvhar)},
                      {"ratio", measures_json(p.ratio)}};
}

ordered_json pair_json(const copula::PairCopula& c) {
  ordered_json j;
  j["family"] = std::string(copula::to_string(c.family));
  j["theta"] = c.theta;
  if (c.family == copula::Family::student_t) j["nu"] = c.nu;
  j["loglik"] = c.loglik;
  j["aic"] = c.aic;
  j["n_obs"] = c.n_obs;
  return j;
}

copula::PairCopula pair_from(const ordered_json& j) {
  copula::PairCopula c;
  c.family = copula::family_from_string(j.at("family").get<std::string>());
  c.theta = j.at("theta").get<double>();
  c.nu = j.value("nu", 0.0);
  c.loglik = j.value("loglik", 0.0);
  c.aic = j.value("aic", 0.0);
  c.n_obs = j.value("n_obs", std::size_t{0});
  return c;
}

template <class F>
auto parse_json(std::string_view text, F&& f) {
  try {
    return f(ordered_json::parse(text));
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("json: ") + e.what());
  }
}

void csv_number(std::ostream& out, double x) { out << (std::isfinite(x) ? format_double(x) : std::string("NA")); }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string format_date(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::chrono::year_month_day parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw IoError("malformed date '" + std::string(text) + "'");
  const auto ok = [&](std::string_view s, auto& v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
  };
  if (!ok(text.substr(0, 4), y) || !ok(text.substr(5, 2), m) || !ok(text.substr(8, 2), d)) {
    throw IoError("malformed date '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw IoError("invalid date '" + std::string(text) + "'");
  return ymd;
}

void write_rk_csv(std::ostream& out, std::span<const realized::RkEstimate> rk) {
  out << "date,rk,bandwidth,n_returns\n";
  for (const auto& e : rk) {
    out << format_date(e.date) << ',' << format_double(e.rk) << ',' << e.bandwidth << ',' << e.n_returns << '\n';
  }
}

std::vector<realized::RkEstimate> read_rk_csv(std::istream& in) {
  CsvTable t(in, {"date", "rk"});
  std::vector<realized::RkEstimate> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i].date = parse_date(t.at(i, "date"));
    out[i].rk = parse_double(t.at(i, "rk"), "rk");
    if (t.has("bandwidth")) out[i].bandwidth = static_cast<int>(parse_int(t.at(i, "bandwidth"), "bandwidth"));
    if (t.has("n_returns")) {
      out[i].n_returns = static_cast<std::size_t>(parse_int(t.at(i, "n_returns"), "n_returns"));
    }
  }
  return out;
}

void write_components_csv(std::ostream& out, std::span<const realized::ComponentRow> rows) {
  out << "date,rk_d,rk_w,rk_m,target\n";
  for (const auto& r : rows) {
    out << format_date(r.date) << ',' << format_double(r.rk_d) << ',' << format_double(r.rk_w) << ','
        << format_double(r.rk_m) << ',' << format_double(r.target) << '\n';
  }
}

realized::RkComponentSeries read_components_csv(std::istream& in) {
  CsvTable t(in, {"date", "rk_d", "rk_w", "rk_m", "target"});
  realized::RkComponentSeries out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i].date = parse_date(t.at(i, "date"));
    out[i].rk_d = parse_double(t.at(i, "rk_d"), "rk_d");
    out[i].rk_w = parse_double(t.at(i, "rk_w"), "rk_w");
    out[i].rk_m = parse_double(t.at(i, "rk_m"), "rk_m");
    out[i].target = parse_double(t.at(i, "target"), "target");
  }
  return out;
}

realized::RkComponentSeries read_components_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_components_csv(in);
}

void write_forecasts_csv(std::ostream& out, std::span<const eval::ForecastRecord> records) {
  out << "date,y,y_prev,yhat_har,yhat_cvhar,har_negative,sample,scheme,window\n";
  for (const auto& r : records) {
    out << format_date(r.date) << ',' << format_double(r.y) << ',' << format_double(r.y_prev) << ','
        << format_double(r.yhat_har) << ',' << format_double(r.yhat_cvhar) << ',' << (r.har_negative ? 1 : 0) << ','
        << (r.in_sample ? "in" : "out") << ',' << eval::to_string(r.scheme) << ',' << r.window << '\n';
  }
}

std::vector<eval::ForecastRecord> read_forecasts_csv(std::istream& in) {
  CsvTable t(in, {"date", "y", "y_prev", "yhat_har", "yhat_cvhar", "har_negative", "sample", "scheme", "window"});
  std::vector<eval::ForecastRecord> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto& r = out[i];
    r.date = parse_date(t.at(i, "date"));
    r.y = parse_double(t.at(i, "y"), "y");
    r.y_prev = parse_double(t.at(i, "y_prev"), "y_prev");
    r.yhat_har = parse_double(t.at(i, "yhat_har"), "yhat_har");
    r.yhat_cvhar = parse_double(t.at(i, "yhat_cvhar"), "yhat_cvhar");
    r.har_negative = t.at(i, "har_negative") == "1";
    r.in_sample = t.at(i, "sample") == "in";
    try {
      r.scheme = eval::scheme_from_string(t.at(i, "scheme"));
    } catch (const ConfigError& e) {
      throw IoError(e.what());
    }
    r.window = static_cast<std::size_t>(parse_int(t.at(i, "window"), "window"));
  }
  return out;
}

std::string to_json(const ingest::CleaningReport& r) {
  ordered_json j;
  j["input"] = r.input;
  j["outside_session"] = r.outside_session;
  j["zero_price"] = r.zero_price;
  j["other_exchange"] = r.other_exchange;
  j["bad_condition"] = r.bad_condition;
  j["merged_same_timestamp"] = r.merged_same_timestamp;
  j["mad_outliers"] = r.mad_outliers;
  j["output"] = r.output;
  return j.dump(2);
}

std::string to_json(const margins::Margin& m) {
  ordered_json j;
  j["kind"] = std::string(margins::to_string(m.kind()));
  switch (m.kind()) {
    case margins::MarginKind::ecdf: j["sample"] = m.sample(); break;
    case margins::MarginKind::kernel:
      j["log_bandwidth"] = m.log_bandwidth();
      j["sample"] = m.sample();
      break;
    case margins::MarginKind::inverse_gaussian:
      j["mu"] = m.mu();
      j["lambda"] = m.lambda();
      break;
    case margins::MarginKind::normal:
      j["mean"] = m.mean();
      j["sd"] = m.sd();
      break;
  }
  return j.dump(2);
}

margins::Margin margin_from_json(std::string_view text) {
  return parse_json(text, [](const ordered_json& j) {
    const auto kind = margins::margin_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
      case margins::MarginKind::ecdf: return margins::Margin::ecdf(j.at("sample").get<std::vector<double>>());
      case margins::MarginKind::kernel:
        return margins::Margin::kernel(j.at("sample").get<std::vector<double>>(), j.at("log_bandwidth").get<double>());
      case margins::MarginKind::inverse_gaussian:
        return margins::Margin::inverse_gaussian(j.at("mu").get<double>(), j.at("lambda").get<double>());
      case margins::MarginKind::normal:
        return margins::Margin::normal(j.at("mean").get<double>(), j.at("sd").get<double>());
    }
    throw IoError("json: unknown margin kind");
  });
}

std::string to_json(const copula::PairCopula& c) { return pair_json(c).dump(2); }

copula::PairCopula pair_copula_from_json(std::string_view text) {
  return parse_json(text, [](const ordered_json& j) { return pair_from(j); });
}

std::string to_json(const vine::CVineModel& model) {
  ordered_json j;
  j["family_set"] = model.family_set;
  j["n_obs"] = model.n_obs;
  j["loglik"] = model.total_loglik;
  ordered_json edges = ordered_json::array();
  for (vine::Edge e : vine::kEdges) {
    ordered_json ej;
    ej["edge"] = std::string(vine::to_string(e));
    ej["tree"] = vine::tree_of(e);
    ej.update(pair_json(model[e]));
    edges.push_back(ej);
  }
  j["edges"] = edges;
  return j.dump(2);
}

vine::CVineModel vine_from_json(std::string_view text) {
  return parse_json(text, [](const ordered_json& j) {
    vine::CVineModel m;
    m.family_set = j.value("family_set", std::string("custom"));
    m.n_obs = j.value("n_obs", std::size_t{0});
    m.total_loglik = j.value("loglik", 0.0);
    const auto& edges = j.at("edges");
    if (edges.size() != vine::kEdgeCount) throw IoError("json: vine must list 6 edges");
    for (const auto& ej : edges) m[vine::edge_from_string(ej.at("edge").get<std::string>())] = pair_from(ej);
    return m;
  });
}

std::string to_json(const har::HarModel& model) {
  ordered_json j;
  j["c"] = model.c;
  j["beta_d"] = model.beta_d;
  j["beta_w"] = model.beta_w;
  j["beta_m"] = model.beta_m;
  j["residual_variance"] = model.residual_variance;
  j["n_obs"] = model.n_obs;
  return j.dump(2);
}

har::HarModel har_from_json(std::string_view text) {
  return parse_json(text, [](const ordered_json& j) {
    har::HarModel m;
    m.c = j.at("c").get<double>();
    m.beta_d = j.at("beta_d").get<double>();
    m.beta_w = j.at("beta_w").get<double>();
    m.beta_m = j.at("beta_m").get<double>();
    m.residual_variance = j.value("residual_variance", 0.0);
    m.n_obs = j.value("n_obs", std::size_t{0});
    return m;
  });
}

std::string to_json(const eval::FittedModels& model) {
  ordered_json j;
  ordered_json m;
  m["monthly"] = ordered_json::parse(to_json(model.margins.monthly));
  m["weekly"] = ordered_json::parse(to_json(model.margins.weekly));
  m["daily"] = ordered_json::parse(to_json(model.margins.daily));
  m["target"] = ordered_json::parse(to_json(model.margins.target));
  j["margins"] = m;
  j["vine"] = ordered_json::parse(to_json(model.vine));
  j["har"] = ordered_json::parse(to_json(model.har));
  return j.dump(2);
}

eval::FittedModels fitted_models_from_json(std::string_view text) {
  return parse_json(text, [](const ordered_json& j) {
    const auto& m = j.at("margins");
    auto margin = [&](const char* key) { return margin_from_json(m.at(key).dump()); };
    return eval::FittedModels{har_from_json(j.at("har").dump()),
                              {margin("monthly"), margin("weekly"), margin("daily"), margin("target")},
                              vine_from_json(j.at("vine").dump())};
  });
}

std::string to_json(const eval::EvalReport& report, std::string_view config_echo) {
  ordered_json j;
  j["scheme"] = std::string(eval::to_string(report.scheme));
  j["window"] = report.window;
  j["margin"] = report.margin;
  j["family_set"] = report.family_set;
  if (report.in_sample) j["in_sample"] = panel_json(*report.in_sample);
  j["out_of_sample"] = panel_json(report.out_of_sample);
  ordered_json tests = ordered_json::array();
  for (const auto& row : report.tests) {
    ordered_json t;
    t["loss"] = std::string(eval::to_string(row.loss));
    auto test_json = [](const eval::TestResult& r) {
      return ordered_json{{"statistic", number(r.statistic)},
                          {"p_value", number(r.p_value)},
                          {"stars", std::string(eval::significance_stars(r.p_value))},
                          {"n", r.n}};
    };
    t["DM"] = row.dm ? test_json(*row.dm) : ordered_json(nullptr);
    t["CPA"] = row.cpa ? test_json(*row.cpa) : ordered_json(nullptr);
    tests.push_back(t);
  }
  j["tests"] = tests;
  j["har_negative_forecasts"] = report.har_negative_forecasts;
  j["last_vine_loglik"] = number(report.last_vine_loglik);
  if (!config_echo.empty()) j["config"] = std::string(config_echo);
  return j.dump(2);
}

void write_measures_csv(std::ostream& out, std::span<const LabelledReport> reports) {
  out << "label,scheme,window,panel,model,MSE,MAE,MAD,MASE,MAPE,QLIK,MDA,n,qlik_excluded\n";
  auto row = [&](const LabelledReport& lr, const char* panel, const char* model, const eval::LossMeasures& m) {
    out << lr.label << ',' << eval::to_string(lr.report.scheme) << ',' << lr.report.window << ',' << panel << ','
        << model;
    for (double x : {m.mse, m.mae, m.mad, m.mase, m.mape, m.qlik, m.mda}) {
      out << ',';
      csv_number(out, x);
    }
    out << ',' << m.n << ',' << m.qlik_excluded << '\n';
  };
  for (const auto& lr : reports) {
    auto panel = [&](const char* name, const eval::Panel& p) {
      row(lr, name, "HAR", p.har);
      row(lr, name, "CV-HAR", p.cvhar);
      row(lr, name, "ratio", p.ratio);
    };
    if (lr.report.in_sample) panel("in_sample", *lr.report.in_sample);
    panel("out_of_sample", lr.report.out_of_sample);
  }
}

void write_tests_csv(std::ostream& out, std::span<const LabelledReport> reports) {
  out << "label,scheme,window,test,loss,statistic,p_value,stars,n\n";
  for (const auto& lr : reports) {
    for (const auto& row : lr.report.tests) {
      auto emit = [&](const char* name, const std::optional<eval::TestResult>& r) {
        if (!r) return;
        out << lr.label << ',' << eval::to_string(lr.report.scheme) << ',' << lr.report.window << ',' << name << ','
            << eval::to_string(row.loss) << ',';
        csv_number(out, r->statistic);
        out << ',';
        csv_number(out, r->p_value);
        out << ',' << eval::significance_stars(r->p_value) << ',' << r->n << '\n';
      };
      emit("DM", row.dm);
      emit("CPA", row.cpa);
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace cvhar::io
