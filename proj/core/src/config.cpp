#include "cvhar/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "cvhar/error.hpp"
#include "cvhar/io.hpp"

namespace cvhar::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v);
  return x;
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  Int x{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
  return x;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

char to_char(std::string_view key, std::string_view v) {
  if (v == "tab") return '\t';
  if (v.size() != 1) bad_value(key, v);
  return v[0];
}

std::string clock_text(std::chrono::minutes m) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", static_cast<int>(m.count() / 60), static_cast<int>(m.count() % 60));
  return buf;
}

std::chrono::minutes to_clock(std::string_view key, std::string_view v) {
  const auto colon = v.find(':');
  if (colon == std::string_view::npos) bad_value(key, v);
  const int h = to_int<int>(key, v.substr(0, colon));
  const int m = to_int<int>(key, v.substr(colon + 1));
  if (h < 0 || h > 24 || m < 0 || m > 59) bad_value(key, v);
  return std::chrono::minutes{h * 60 + m};
}

std::string margin_code(margins::MarginKind k) {
  switch (k) {
    case margins::MarginKind::ecdf: return "E";
    case margins::MarginKind::kernel: return "K";
    case margins::MarginKind::inverse_gaussian: return "P";
    case margins::MarginKind::normal: return "normal";
  }
  return "E";
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

const std::vector<Field>& fields() {
  using io::format_double;
  static const std::vector<Field> table = {
      {"inputs", [](const RunConfig& c) { return join(c.inputs); },
       [](RunConfig& c, std::string_view v) { c.inputs = split_list(v); }},
      {"output_dir", [](const RunConfig& c) { return c.output_dir; },
       [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); }},
      {"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, std::string_view v) { c.seed = to_int<std::uint64_t>("seed", v); }},

      {"column_timestamp", [](const RunConfig& c) { return c.columns.timestamp; },
       [](RunConfig& c, std::string_view v) { c.columns.timestamp = std::string(v); }},
      {"column_price", [](const RunConfig& c) { return c.columns.price; },
       [](RunConfig& c, std::string_view v) { c.columns.price = std::string(v); }},
      {"column_size", [](const RunConfig& c) { return c.columns.size; },
       [](RunConfig& c, std::string_view v) { c.columns.size = std::string(v); }},
      {"column_exchange", [](const RunConfig& c) { return c.columns.exchange; },
       [](RunConfig& c, std::string_view v) { c.columns.exchange = std::string(v); }},
      {"column_condition", [](const RunConfig& c) { return c.columns.condition; },
       [](RunConfig& c, std::string_view v) { c.columns.condition = std::string(v); }},
      {"delimiter",
       [](const RunConfig& c) { return c.columns.delimiter == '\t' ? std::string("tab") : std::string(1, c.columns.delimiter); },
       [](RunConfig& c, std::string_view v) { c.columns.delimiter = to_char("delimiter", v); }},

      {"session_open", [](const RunConfig& c) { return clock_text(c.cleaning.session_open); },
       [](RunConfig& c, std::string_view v) { c.cleaning.session_open = to_clock("session_open", v); }},
      {"session_close", [](const RunConfig& c) { return clock_text(c.cleaning.session_close); },
       [](RunConfig& c, std::string_view v) { c.cleaning.session_close = to_clock("session_close", v); }},
      {"utc_offset_minutes", [](const RunConfig& c) { return std::to_string(c.cleaning.utc_offset.count()); },
       [](RunConfig& c, std::string_view v) {
         c.cleaning.utc_offset = std::chrono::minutes{to_int<long>("utc_offset_minutes", v)};
       }},
      {"keep_exchange", [](const RunConfig& c) { return c.cleaning.keep_exchange.value_or(""); },
       [](RunConfig& c, std::string_view v) {
         if (v.empty()) {
           c.cleaning.keep_exchange.reset();
         } else {
           c.cleaning.keep_exchange = std::string(v);
         }
       }},
      {"bad_condition_codes",
       [](const RunConfig& c) {
         return join(std::vector<std::string>(c.cleaning.bad_condition_codes.begin(), c.cleaning.bad_condition_codes.end()));
       },
       [](RunConfig& c, std::string_view v) {
         const auto parts = split_list(v);
         c.cleaning.bad_condition_codes = std::set<std::string>(parts.begin(), parts.end());
       }},
      {"mad_multiplier", [](const RunConfig& c) { return format_double(c.cleaning.mad_multiplier); },
       [](RunConfig& c, std::string_view v) { c.cleaning.mad_multiplier = to_double("mad_multiplier", v); }},
      {"mad_window_ns", [](const RunConfig& c) { return std::to_string(c.cleaning.mad_window.count()); },
       [](RunConfig& c, std::string_view v) {
         c.cleaning.mad_window = std::chrono::nanoseconds{to_int<long long>("mad_window_ns", v)};
       }},
      {"min_day_ticks", [](const RunConfig& c) { return std::to_string(c.min_day_ticks); },
       [](RunConfig& c, std::string_view v) { c.min_day_ticks = to_int<std::size_t>("min_day_ticks", v); }},

      {"sparse_interval_minutes", [](const RunConfig& c) { return std::to_string(c.bandwidth.sparse_interval.count()); },
       [](RunConfig& c, std::string_view v) {
         c.bandwidth.sparse_interval = std::chrono::minutes{to_int<long>("sparse_interval_minutes", v)};
       }},
      {"sparse_offset_seconds",
       [](const RunConfig& c) { return std::to_string(c.bandwidth.sparse_offset_step.count()); },
       [](RunConfig& c, std::string_view v) {
         c.bandwidth.sparse_offset_step = std::chrono::seconds{to_int<long>("sparse_offset_seconds", v)};
       }},
      {"rk_min_ticks", [](const RunConfig& c) { return std::to_string(c.bandwidth.min_ticks); },
       [](RunConfig& c, std::string_view v) { c.bandwidth.min_ticks = to_int<std::size_t>("rk_min_ticks", v); }},
      {"jitter", [](const RunConfig& c) { return std::to_string(c.bandwidth.jitter); },
       [](RunConfig& c, std::string_view v) { c.bandwidth.jitter = to_int<int>("jitter", v); }},

      {"scheme", [](const RunConfig& c) { return std::string(eval::to_string(c.scheme.scheme)); },
       [](RunConfig& c, std::string_view v) { c.scheme.scheme = eval::scheme_from_string(v); }},
      {"window", [](const RunConfig& c) { return std::to_string(c.scheme.window); },
       [](RunConfig& c, std::string_view v) { c.scheme.window = to_int<std::size_t>("window", v); }},
      {"allow_any_window", [](const RunConfig& c) { return std::string(c.scheme.allow_any_window ? "true" : "false"); },
       [](RunConfig& c, std::string_view v) { c.scheme.allow_any_window = to_bool("allow_any_window", v); }},
      {"margin", [](const RunConfig& c) { return margin_code(c.scheme.margin); },
       [](RunConfig& c, std::string_view v) { c.scheme.margin = margins::margin_kind_from_string(v); }},
      {"kernel_bandwidth",
       [](const RunConfig& c) {
         return c.scheme.margin_options.kernel_bandwidth ? format_double(*c.scheme.margin_options.kernel_bandwidth)
                                                         : std::string();
       },
       [](RunConfig& c, std::string_view v) {
         if (v.empty()) {
           c.scheme.margin_options.kernel_bandwidth.reset();
         } else {
           c.scheme.margin_options.kernel_bandwidth = to_double("kernel_bandwidth", v);
         }
       }},
      {"margin_min_sample", [](const RunConfig& c) { return std::to_string(c.scheme.margin_options.min_sample); },
       [](RunConfig& c, std::string_view v) {
         c.scheme.margin_options.min_sample = to_int<std::size_t>("margin_min_sample", v);
       }},
      {"family_set", [](const RunConfig& c) { return std::string(copula::to_string(c.scheme.family_set)); },
       [](RunConfig& c, std::string_view v) { c.scheme.family_set = copula::family_set_from_string(v); }},
      {"copula_min_obs", [](const RunConfig& c) { return std::to_string(c.scheme.copula_options.min_obs); },
       [](RunConfig& c, std::string_view v) {
         c.scheme.copula_options.min_obs = to_int<std::size_t>("copula_min_obs", v);
       }},
      {"independence_pretest",
       [](const RunConfig& c) { return std::string(c.scheme.copula_options.independence_pretest ? "true" : "false"); },
       [](RunConfig& c, std::string_view v) {
         c.scheme.copula_options.independence_pretest = to_bool("independence_pretest", v);
       }},
      {"independence_alpha", [](const RunConfig& c) { return format_double(c.scheme.copula_options.alpha); },
       [](RunConfig& c, std::string_view v) { c.scheme.copula_options.alpha = to_double("independence_alpha", v); }},
      {"quad_rel_tol", [](const RunConfig& c) { return format_double(c.scheme.expectation.rel_tol); },
       [](RunConfig& c, std::string_view v) { c.scheme.expectation.rel_tol = to_double("quad_rel_tol", v); }},
      {"quad_upper_tail", [](const RunConfig& c) { return format_double(c.scheme.expectation.upper_tail); },
       [](RunConfig& c, std::string_view v) { c.scheme.expectation.upper_tail = to_double("quad_upper_tail", v); }},
      {"quad_initial_panels", [](const RunConfig& c) { return std::to_string(c.scheme.expectation.initial_panels); },
       [](RunConfig& c, std::string_view v) {
         c.scheme.expectation.initial_panels = to_int<int>("quad_initial_panels", v);
       }},
      {"quad_max_panels", [](const RunConfig& c) { return std::to_string(c.scheme.expectation.max_panels); },
       [](RunConfig& c, std::string_view v) { c.scheme.expectation.max_panels = to_int<int>("quad_max_panels", v); }},
      {"har_min_obs", [](const RunConfig& c) { return std::to_string(c.scheme.har_options.min_obs); },
       [](RunConfig& c, std::string_view v) { c.scheme.har_options.min_obs = to_int<std::size_t>("har_min_obs", v); }},
      {"dm_lags", [](const RunConfig& c) { return std::to_string(c.scheme.dm_lags); },
       [](RunConfig& c, std::string_view v) { c.scheme.dm_lags = to_int<int>("dm_lags", v); }},
  };
  return table;
}

}  // namespace

void set_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(cfg, trim(value));
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  set_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      if (line.find('=') == std::string_view::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      }
      apply_override(cfg, line);
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(io::read_file(path)); }

std::string to_text(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_text(a) == to_text(b); }

}  // namespace cvhar::config
