#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvhar/config.hpp"
#include "cvhar/error.hpp"
#include "cvhar/evaluate.hpp"
#include "cvhar/ingest.hpp"
#include "cvhar/io.hpp"
#include "cvhar/realized.hpp"
#include "cvhar/synthetic.hpp"
#include "cvhar/vine.hpp"

namespace cvhar::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Options shared by every subcommand: a config file plus key=value
// overrides, applied in that order before the subcommand's own flags.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "key = value configuration file");
  sub->add_option("--set", c.overrides, "override one configuration key (key=value)");
}

config::RunConfig resolve(const Common& c) {
  config::RunConfig cfg;
  if (!c.config_path.empty()) cfg = config::load_config(c.config_path);
  for (const auto& o : c.overrides) config::apply_override(cfg, o);
  return cfg;
}

void set_if(config::RunConfig& cfg, const char* key, const std::optional<std::string>& v) {
  if (v) config::set_value(cfg, key, *v);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

template <class Writer>
void write_with(const fs::path& path, Writer&& w) {
  std::ostringstream ss;
  w(ss);
  io::write_file(path, ss.str());
}

// ---- clean ---------------------------------------------------------------

struct CleanArgs {
  Common common;
  std::string input;
  std::string output;
  std::string report;
  std::optional<std::string> keep_exchange, session_open, session_close, utc_offset, bad_conditions, mad_multiplier;
};

int cmd_clean(const CleanArgs& a, std::ostream& out) {
  auto cfg = resolve(a.common);
  set_if(cfg, "keep_exchange", a.keep_exchange);
  set_if(cfg, "session_open", a.session_open);
  set_if(cfg, "session_close", a.session_close);
  set_if(cfg, "utc_offset_minutes", a.utc_offset);
  set_if(cfg, "bad_condition_codes", a.bad_conditions);
  set_if(cfg, "mad_multiplier", a.mad_multiplier);
  cfg.cleaning.validate();

  const auto parsed = ingest::parse_ticks(a.input, cfg.columns);
  const auto cleaned = ingest::clean_ticks(parsed.ticks, cfg.cleaning);
  write_with(a.output, [&](std::ostream& s) { ingest::write_ticks(s, cleaned.ticks); });

  auto report = ordered_json::parse(io::to_json(cleaned.report));
  report["rows_read"] = parsed.rows_read;
  report["malformed_rows"] = parsed.malformed_rows;
  report["config"] = config::to_text(cfg);
  const fs::path report_path = a.report.empty() ? fs::path(a.output + ".report.json") : fs::path(a.report);
  io::write_file(report_path, report.dump(2) + "\n");
  out << "clean: " << cleaned.report.input << " ticks in, " << cleaned.report.output << " out\n";
  return 0;
}

// ---- rk ------------------------------------------------------------------

struct RkArgs {
  Common common;
  std::string input;
  std::string output_dir;
  std::optional<std::string> min_day_ticks;
};

int cmd_rk(const RkArgs& a, std::ostream& out) {
  auto cfg = resolve(a.common);
  set_if(cfg, "min_day_ticks", a.min_day_ticks);
  const auto parsed = ingest::parse_ticks(a.input, cfg.columns);
  const auto sessions = ingest::to_daily_sessions(parsed.ticks, cfg.cleaning.utc_offset, cfg.min_day_ticks);
  const auto rk = realized::estimate_days(sessions, cfg.bandwidth);
  if (rk.size() < realized::kMonthlyWindow + 1) {
    throw_domain("rk: " + std::to_string(rk.size()) + " usable days; components need at least " +
                 std::to_string(realized::kMonthlyWindow + 1));
  }
  const auto rows = realized::build_components(rk);
  const fs::path dir = a.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path(a.output_dir);
  ensure_dir(dir);
  write_with(dir / "rk.csv", [&](std::ostream& s) { io::write_rk_csv(s, rk); });
  write_with(dir / "components.csv", [&](std::ostream& s) { io::write_components_csv(s, rows); });
  out << "rk: " << rk.size() << " days, " << rows.size() << " component rows\n";
  return 0;
}

// ---- fit / forecast ---------------------------------------------------------

struct SchemeFlags {
  std::optional<std::string> scheme, window, margin, family_set;
};

void add_scheme_flags(CLI::App* sub, SchemeFlags& f) {
  sub->add_option("--scheme", f.scheme, "FW, IW or RW");
  sub->add_option("-w,--window", f.window, "estimation window W");
  sub->add_option("-m,--margin", f.margin, "E, K or P");
  sub->add_option("-f,--family-set", f.family_set, "A or AGT");
}

void apply_scheme_flags(config::RunConfig& cfg, const SchemeFlags& f) {
  set_if(cfg, "scheme", f.scheme);
  set_if(cfg, "window", f.window);
  set_if(cfg, "margin", f.margin);
  set_if(cfg, "family_set", f.family_set);
}

struct FitArgs {
  Common common;
  SchemeFlags scheme;
  std::string components;
  std::string output;
  bool all_rows = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  auto cfg = resolve(a.common);
  apply_scheme_flags(cfg, a.scheme);
  const auto rows = io::read_components_csv(fs::path(a.components));
  std::span<const realized::ComponentRow> window(rows);
  if (!a.all_rows) {
    if (rows.size() < cfg.scheme.window) {
      throw_domain("fit: " + std::to_string(rows.size()) + " rows, window needs " + std::to_string(cfg.scheme.window));
    }
    window = window.last(cfg.scheme.window);
  }
  const auto models = eval::fit_models(window, cfg.scheme);
  io::write_file(a.output, io::to_json(models) + "\n");
  out << "fit: " << window.size() << " rows, vine loglik " << io::format_double(models.vine.total_loglik) << "\n";
  return 0;
}

struct ForecastArgs {
  Common common;
  std::string model;
  std::string components;
  std::string date;
  std::string output;
};

int cmd_forecast(const ForecastArgs& a, std::ostream& out) {
  const auto cfg = resolve(a.common);
  const auto models = io::fitted_models_from_json(io::read_file(a.model));
  const auto rows = io::read_components_csv(fs::path(a.components));
  if (rows.empty()) throw_domain("forecast: empty components file");
  auto it = rows.end() - 1;
  if (!a.date.empty()) {
    const auto d = io::parse_date(a.date);
    it = std::find_if(rows.begin(), rows.end(), [&](const realized::ComponentRow& r) { return r.date == d; });
    if (it == rows.end()) throw_domain("forecast: no row dated " + a.date);
  }
  const auto har = har::har_forecast(models.har, it->rk_d, it->rk_w, it->rk_m);
  const auto cv =
      vine::conditional_expectation(models.vine, models.margins, {it->rk_m, it->rk_w, it->rk_d}, cfg.scheme.expectation);
  std::ostringstream s;
  s << "date,rk_d,rk_w,rk_m,yhat_har,har_negative,yhat_cvhar,tail_mass\n"
    << io::format_date(it->date) << ',' << io::format_double(it->rk_d) << ',' << io::format_double(it->rk_w) << ','
    << io::format_double(it->rk_m) << ',' << io::format_double(har.value) << ',' << (har.negative ? 1 : 0) << ','
    << io::format_double(cv.value) << ',' << io::format_double(cv.tail_mass) << '\n';
  if (a.output.empty()) {
    out << s.str();
  } else {
    io::write_file(a.output, s.str());
  }
  return 0;
}

// ---- backtest --------------------------------------------------------------

struct Instrument {
  std::string name;
  fs::path path;
};

// One "name,path" or bare "path" per line; relative paths are taken from
// the manifest's directory.
std::vector<Instrument> read_manifest(const fs::path& manifest) {
  std::istringstream in(io::read_file(manifest));
  std::vector<Instrument> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    Instrument ins;
    if (const auto comma = line.find(','); comma != std::string::npos) {
      ins.name = line.substr(0, comma);
      ins.path = line.substr(comma + 1);
    } else {
      ins.path = line;
      ins.name = ins.path.stem().string();
    }
    if (ins.path.is_relative()) ins.path = manifest.parent_path() / ins.path;
    out.push_back(std::move(ins));
  }
  if (out.empty()) throw ConfigError("manifest '" + manifest.string() + "' lists no instruments");
  return out;
}

struct BacktestArgs {
  Common common;
  SchemeFlags scheme;
  std::vector<std::string> components;
  std::string manifest;
  std::string output_dir;
  std::optional<std::string> dm_lags;
  unsigned jobs = 0;
};

// Instruments run on a small worker pool; results land in their input slot,
// so the output order never depends on completion order.
std::vector<eval::SchemeResult> run_all(const std::vector<Instrument>& instruments, const eval::SchemeConfig& cfg,
                                        unsigned jobs) {
  std::vector<std::optional<eval::SchemeResult>> results(instruments.size());
  std::vector<std::exception_ptr> errors(instruments.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instruments.size(); i = next++) {
      try {
        const auto rows = io::read_components_csv(instruments[i].path);
        results[i] = eval::run_scheme(rows, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(instruments.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<eval::SchemeResult> out;
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

int cmd_backtest(const BacktestArgs& a, std::ostream& out) {
  auto cfg = resolve(a.common);
  apply_scheme_flags(cfg, a.scheme);
  set_if(cfg, "dm_lags", a.dm_lags);
  if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;

  std::vector<Instrument> instruments;
  if (!a.manifest.empty()) instruments = read_manifest(a.manifest);
  std::vector<std::string> paths = a.components;
  if (paths.empty() && a.manifest.empty()) paths = cfg.inputs;
  for (const auto& p : paths) instruments.push_back({fs::path(p).stem().string(), p});
  if (instruments.empty()) throw ConfigError("backtest: no input components given");
  for (std::size_t i = 0; i < instruments.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (instruments[i].name == instruments[j].name) instruments[i].name += "_" + std::to_string(i);
    }
  }
  if (cfg.inputs.empty()) {
    for (const auto& ins : instruments) cfg.inputs.push_back(ins.path.string());
  }
  eval::validate(cfg.scheme);

  const auto results = run_all(instruments, cfg.scheme, a.jobs);
  const fs::path dir(cfg.output_dir);
  ensure_dir(dir);
  const std::string echo = config::to_text(cfg);
  io::write_file(dir / "config.txt", echo);

  std::vector<std::vector<eval::ForecastRecord>> per_instrument;
  std::vector<io::LabelledReport> labelled;
  ordered_json inst = ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    write_with(dir / ("forecasts_" + instruments[i].name + ".csv"),
               [&](std::ostream& s) { io::write_forecasts_csv(s, r.records); });
    per_instrument.push_back(r.records);
    labelled.push_back({instruments[i].name, r.report});
    inst.push_back({{"name", instruments[i].name},
                    {"report", ordered_json::parse(io::to_json(r.report))},
                    {"vine", ordered_json::parse(io::to_json(r.last_vine))},
                    {"har", ordered_json::parse(io::to_json(r.last_har))}});
  }
  auto agg = eval::aggregate_reports(per_instrument, cfg.scheme.scheme, cfg.scheme.window, cfg.scheme.dm_lags);
  agg.margin = results.front().report.margin;
  agg.family_set = results.front().report.family_set;
  agg.last_vine_loglik = results.front().report.last_vine_loglik;
  labelled.push_back({"all", agg});

  ordered_json report;
  report["aggregate"] = ordered_json::parse(io::to_json(agg));
  report["instruments"] = inst;
  report["config"] = echo;
  io::write_file(dir / "report.json", report.dump(2) + "\n");
  write_with(dir / "measures.csv", [&](std::ostream& s) { io::write_measures_csv(s, labelled); });
  write_with(dir / "tests.csv", [&](std::ostream& s) { io::write_tests_csv(s, labelled); });

  const auto& ratio = agg.out_of_sample.ratio;
  out << "backtest " << eval::to_string(cfg.scheme.scheme) << " W=" << cfg.scheme.window << ": "
      << instruments.size() << " instrument(s), ratio MAE " << io::format_double(ratio.mae) << " MAD "
      << io::format_double(ratio.mad) << " QLIK " << io::format_double(ratio.qlik) << "\n";
  return 0;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string kind = "markov";
  std::size_t days = 1626;
  std::size_t ticks = 2000;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  auto cfg = resolve(a.common);
  if (a.seed) cfg.seed = *a.seed;
  const fs::path dir = a.output_dir.empty() ? fs::path(cfg.output_dir) : fs::path(a.output_dir);
  ensure_dir(dir);
  synthetic::Rng rng(cfg.seed);
  const auto dates = synthetic::business_days(std::chrono::year{2010} / 1 / 4, a.days);

  if (a.kind == "ticks") {
    const auto var = synthetic::log_ar_variances(rng, a.days, 1e-4, 0.9, 0.3);
    synthetic::TickDayOptions opts;
    opts.n_ticks = a.ticks;
    opts.noise_sd = 2e-4;
    opts.utc_offset = cfg.cleaning.utc_offset;
    opts.open = cfg.cleaning.session_open;
    opts.close = cfg.cleaning.session_close;
    ingest::TickSeries all;
    for (std::size_t d = 0; d < a.days; ++d) {
      opts.daily_variance = var[d];
      auto day = synthetic::tick_day(rng, dates[d], opts);
      opts.start_price = day.back().price;
      all.insert(all.end(), day.begin(), day.end());
    }
    write_with(dir / "ticks.csv", [&](std::ostream& s) { ingest::write_ticks(s, all); });
    out << "simulate: " << all.size() << " ticks over " << a.days << " days\n";
    return 0;
  }

  std::vector<double> rk;
  if (a.kind == "linear") {
    rk = synthetic::linear_har_series(rng, a.days, {}, 0.1, 0.5);
  } else if (a.kind == "logsv") {
    rk = synthetic::nonlinear_sv_series(rng, a.days, {});
  } else if (a.kind == "markov") {
    rk = synthetic::copula_markov_series(rng, a.days, copula::PairCopula::make(copula::Family::clayton, 3.0),
                                         margins::Margin::inverse_gaussian(1.0, 1.0));
  } else {
    throw ConfigError("simulate: unknown kind '" + a.kind + "' (ticks, linear, logsv, markov)");
  }
  std::vector<realized::RkEstimate> est(rk.size());
  for (std::size_t i = 0; i < rk.size(); ++i) est[i] = {dates[i], rk[i], 0, 0};
  const auto rows = realized::build_components(est);
  write_with(dir / "rk.csv", [&](std::ostream& s) { io::write_rk_csv(s, est); });
  write_with(dir / "components.csv", [&](std::ostream& s) { io::write_components_csv(s, rows); });
  out << "simulate: " << rk.size() << " days, " << rows.size() << " component rows\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cvhar: realized-kernel HAR and C-vine volatility forecasting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cvhar 0.1.0");

  CleanArgs clean;
  auto* c = app.add_subcommand("clean", "filter and aggregate a raw trade file");
  add_common(c, clean.common);
  c->add_option("-i,--input", clean.input, "raw trade CSV")->required();
  c->add_option("-o,--output", clean.output, "cleaned tick CSV")->required();
  c->add_option("--report", clean.report, "cleaning report JSON (default <output>.report.json)");
  c->add_option("--keep-exchange", clean.keep_exchange, "retain only this exchange code");
  c->add_option("--session-open", clean.session_open, "HH:MM local");
  c->add_option("--session-close", clean.session_close, "HH:MM local");
  c->add_option("--utc-offset", clean.utc_offset, "minutes added to UTC for local time");
  c->add_option("--bad-conditions", clean.bad_conditions, "comma separated sale-condition codes to drop");
  c->add_option("--mad-multiplier", clean.mad_multiplier, "outlier threshold in MADs");

  RkArgs rk;
  auto* r = app.add_subcommand("rk", "daily realized kernels and HAR components from cleaned ticks");
  add_common(r, rk.common);
  r->add_option("-i,--input", rk.input, "cleaned tick CSV")->required();
  r->add_option("-o,--output-dir", rk.output_dir, "directory for rk.csv and components.csv");
  r->add_option("--min-day-ticks", rk.min_day_ticks, "skip days with fewer ticks");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "fit margins, C-vine and HAR on the last W rows");
  add_common(f, fit.common);
  add_scheme_flags(f, fit.scheme);
  f->add_option("-i,--components", fit.components, "components CSV")->required();
  f->add_option("-o,--output", fit.output, "model JSON")->required();
  f->add_flag("--all-rows", fit.all_rows, "fit on every row instead of the last W");

  ForecastArgs fc;
  auto* fo = app.add_subcommand("forecast", "one-step HAR and CV-HAR forecast from a fitted model");
  add_common(fo, fc.common);
  fo->add_option("--model", fc.model, "model JSON written by fit")->required();
  fo->add_option("-i,--components", fc.components, "components CSV")->required();
  fo->add_option("--date", fc.date, "conditioning row date (default: last row)");
  fo->add_option("-o,--output", fc.output, "CSV output (default: stdout)");

  BacktestArgs bt;
  auto* b = app.add_subcommand("backtest", "FW / IW / RW forecast comparison");
  add_common(b, bt.common);
  add_scheme_flags(b, bt.scheme);
  b->add_option("-i,--components", bt.components, "components CSV (repeatable)");
  b->add_option("--manifest", bt.manifest, "file listing one components CSV per line");
  b->add_option("-o,--output-dir", bt.output_dir, "output directory");
  b->add_option("--dm-lags", bt.dm_lags, "Newey-West lags for the DM test");
  b->add_option("-j,--jobs", bt.jobs, "worker threads (default: hardware concurrency)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "synthetic ticks or daily RK series");
  add_common(s, sim.common);
  s->add_option("--kind", sim.kind, "ticks, linear, logsv or markov")->capture_default_str();
  s->add_option("--days", sim.days, "number of days")->capture_default_str();
  s->add_option("--ticks", sim.ticks, "ticks per day (kind=ticks)")->capture_default_str();
  s->add_option("--seed", sim.seed, "random seed (default: config seed)");
  s->add_option("-o,--output-dir", sim.output_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c) return cmd_clean(clean, out);
    if (*r) return cmd_rk(rk, out);
    if (*f) return cmd_fit(fit, out);
    if (*fo) return cmd_forecast(fc, out);
    if (*b) return cmd_backtest(bt, out);
    if (*s) return cmd_simulate(sim, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cvhar::cli
