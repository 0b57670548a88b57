#include "cvhar/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cvhar/error.hpp"
#include "cvhar/numeric.hpp"

namespace cvhar::ingest {

namespace {

using std::chrono::days;
using std::chrono::nanoseconds;

constexpr std::int64_t kNsPerSecond = 1'000'000'000LL;
constexpr std::int64_t kNsPerDay = 86'400LL * kNsPerSecond;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& value) {
  // from_chars for double is available in libstdc++ 11
  return parse_number(s, value) && std::isfinite(value);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

TimestampNs local_ns(TimestampNs ts, std::chrono::minutes offset) {
  return ts + std::chrono::duration_cast<nanoseconds>(offset).count();
}

std::int64_t time_of_day_ns(TimestampNs ts, std::chrono::minutes offset) {
  const TimestampNs local = local_ns(ts, offset);
  return local - floor_div(local, kNsPerDay) * kNsPerDay;
}

Tick merge_same_timestamp(std::span<const Tick> group) {
  Tick out = group.front();
  std::vector<double> prices;
  prices.reserve(group.size());
  std::int64_t size = 0;
  for (const Tick& t : group) {
    prices.push_back(t.price);
    size += t.size;
  }
  out.price = numeric::median(std::move(prices));
  out.size = size;
  return out;
}

// One sweep of the MAD rule; returns a keep-mask.
std::vector<bool> mad_keep_mask(const TickSeries& ticks, const CleaningConfig& cfg) {
  const std::size_t n = ticks.size();
  std::vector<bool> keep(n, true);
  if (n < 3) return keep;
  const std::int64_t half = cfg.mad_window.count() / 2;

  // Window [lo[i], hi[i]) of ticks within +-half of tick i.
  std::vector<std::size_t> lo(n), hi(n);
  {
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (ticks[a].timestamp < ticks[i].timestamp - half) ++a;
      if (b < i) b = i;
      while (b < n && ticks[b].timestamp <= ticks[i].timestamp + half) ++b;
      lo[i] = a;
      hi[i] = b;
    }
  }

  std::vector<double> deviation(n);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.clear();
    for (std::size_t j = lo[i]; j < hi[i]; ++j) scratch.push_back(ticks[j].price);
    deviation[i] = std::abs(ticks[i].price - numeric::median(scratch));
  }

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + deviation[i];

  for (std::size_t i = 0; i < n; ++i) {
    const double count = static_cast<double>(hi[i] - lo[i]);
    const double mean_dev = (prefix[hi[i]] - prefix[lo[i]]) / count;
    if (deviation[i] > cfg.mad_multiplier * mean_dev) keep[i] = false;
  }
  return keep;
}

}  // namespace

std::optional<TimestampNs> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;

  const bool all_digits = std::all_of(text.begin() + (text.front() == '-' ? 1 : 0), text.end(),
                                      [](char c) { return c >= '0' && c <= '9'; });
  if (all_digits) {
    std::int64_t ns = 0;
    if (!parse_number(text, ns)) return std::nullopt;
    return ns;
  }

  // YYYY-MM-DD[T ]HH:MM:SS[.fffffffff][Z]
  if (text.size() < 19) return std::nullopt;
  int year = 0;
  unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!parse_number(text.substr(0, 4), year) || text[4] != '-' ||
      !parse_number(text.substr(5, 2), month) || text[7] != '-' ||
      !parse_number(text.substr(8, 2), day) || (text[10] != 'T' && text[10] != ' ') ||
      !parse_number(text.substr(11, 2), hour) || text[13] != ':' ||
      !parse_number(text.substr(14, 2), minute) || text[16] != ':' ||
      !parse_number(text.substr(17, 2), second)) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) return std::nullopt;

  std::string_view rest = text.substr(19);
  std::int64_t frac_ns = 0;
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    std::size_t digits = 0;
    std::int64_t scale = 100'000'000;
    while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
      if (digits < 9) {
        frac_ns += (rest.front() - '0') * scale;
        scale /= 10;
      }
      ++digits;
      rest.remove_prefix(1);
    }
    if (digits == 0) return std::nullopt;
  }
  if (rest == "Z") rest.remove_prefix(1);
  if (!rest.empty()) return std::nullopt;

  const std::int64_t day_count = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return day_count * kNsPerDay +
         (static_cast<std::int64_t>(hour) * 3600 + minute * 60 + second) * kNsPerSecond + frac_ns;
}

std::string format_timestamp(TimestampNs ts) {
  const std::int64_t day_count = floor_div(ts, kNsPerDay);
  std::int64_t rem = ts - day_count * kNsPerDay;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{days{day_count}}};
  const std::int64_t secs = rem / kNsPerSecond;
  const std::int64_t frac = rem % kNsPerSecond;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%09lld",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60),
                static_cast<long long>(frac));
  return buf;
}

ParseResult parse_ticks(std::istream& in, const ColumnMapping& columns) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("no parsable rows");

  const auto header = split(line, columns.delimiter);
  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto ts_col = find_col(columns.timestamp);
  const auto price_col = find_col(columns.price);
  if (!ts_col || !price_col) {
    throw IoError("missing required column '" + (ts_col ? columns.price : columns.timestamp) + "'");
  }
  const auto size_col = find_col(columns.size);
  const auto exch_col = find_col(columns.exchange);
  const auto cond_col = find_col(columns.condition);

  ParseResult out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++out.rows_read;
    const auto fields = split(line, columns.delimiter);
    auto field = [&](std::optional<std::size_t> col) -> std::string_view {
      return col && *col < fields.size() ? fields[*col] : std::string_view{};
    };
    Tick tick;
    const auto ts = parse_timestamp(field(ts_col));
    if (!ts || *price_col >= fields.size() || !parse_double(field(price_col), tick.price) ||
        tick.price < 0.0) {
      ++out.malformed_rows;
      continue;
    }
    tick.timestamp = *ts;
    if (size_col) {
      const auto s = field(size_col);
      if (!s.empty() && !parse_number(s, tick.size)) {
        double d = 0.0;
        if (!parse_double(s, d) || d < 0.0) {
          ++out.malformed_rows;
          continue;
        }
        tick.size = static_cast<std::int64_t>(d);
      }
    }
    tick.exchange = std::string(field(exch_col));
    tick.sale_condition = std::string(field(cond_col));
    out.ticks.push_back(std::move(tick));
  }
  if (out.ticks.empty()) throw DomainError("no parsable rows");
  std::stable_sort(out.ticks.begin(), out.ticks.end(),
                   [](const Tick& a, const Tick& b) { return a.timestamp < b.timestamp; });
  return out;
}

ParseResult parse_ticks(const std::filesystem::path& path, const ColumnMapping& columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tick file: " + path.string());
  return parse_ticks(in, columns);
}

void CleaningConfig::validate() const {
  if (!(mad_multiplier > 0.0)) throw ConfigError("mad_multiplier must be positive");
  if (mad_window.count() <= 0) throw ConfigError("mad_window must be positive");
  if (session_close <= session_open) throw ConfigError("session_close must follow session_open");
}

bool has_bad_condition(std::string_view condition, const std::set<std::string>& bad_codes) {
  if (bad_codes.empty()) return false;
  std::size_t pos = 0;
  while (pos < condition.size()) {
    while (pos < condition.size() && condition[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < condition.size() && condition[end] != ' ') ++end;
    if (end > pos && bad_codes.count(std::string(condition.substr(pos, end - pos)))) return true;
    pos = end;
  }
  for (const auto& code : bad_codes) {
    if (code.size() == 1 && condition.find(code[0]) != std::string_view::npos) return true;
  }
  return false;
}

CleaningResult clean_ticks(std::span<const Tick> raw, const CleaningConfig& cfg) {
  cfg.validate();
  CleaningResult result;
  CleaningReport& report = result.report;
  report.input = raw.size();

  const std::int64_t open_ns = std::chrono::duration_cast<nanoseconds>(cfg.session_open).count();
  const std::int64_t close_ns = std::chrono::duration_cast<nanoseconds>(cfg.session_close).count();

  TickSeries kept;
  kept.reserve(raw.size());
  for (const Tick& t : raw) {
    const std::int64_t tod = time_of_day_ns(t.timestamp, cfg.utc_offset);
    if (tod < open_ns || tod > close_ns) {
      ++report.outside_session;
    } else if (!(t.price > 0.0)) {
      ++report.zero_price;
    } else if (cfg.keep_exchange && t.exchange != *cfg.keep_exchange) {
      ++report.other_exchange;
    } else if (has_bad_condition(t.sale_condition, cfg.bad_condition_codes)) {
      ++report.bad_condition;
    } else {
      kept.push_back(t);
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Tick& a, const Tick& b) { return a.timestamp < b.timestamp; });

  TickSeries merged;
  merged.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size();) {
    std::size_t j = i + 1;
    while (j < kept.size() && kept[j].timestamp == kept[i].timestamp) ++j;
    if (j - i == 1) {
      merged.push_back(std::move(kept[i]));
    } else {
      merged.push_back(merge_same_timestamp(std::span<const Tick>(kept).subspan(i, j - i)));
      report.merged_same_timestamp += j - i - 1;
    }
    i = j;
  }

  // Sweeps run per day so windows never straddle the overnight gap.
  TickSeries& out = result.ticks;
  out.reserve(merged.size());
  for (std::size_t i = 0; i < merged.size();) {
    const auto day = floor_div(local_ns(merged[i].timestamp, cfg.utc_offset), kNsPerDay);
    std::size_t j = i;
    while (j < merged.size() && floor_div(local_ns(merged[j].timestamp, cfg.utc_offset), kNsPerDay) == day) ++j;
    TickSeries day_ticks(std::make_move_iterator(merged.begin() + static_cast<std::ptrdiff_t>(i)),
                         std::make_move_iterator(merged.begin() + static_cast<std::ptrdiff_t>(j)));
    for (int pass = 0; pass < 1000; ++pass) {
      const auto keep = mad_keep_mask(day_ticks, cfg);
      const auto removed = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), false));
      if (removed == 0) break;
      report.mad_outliers += removed;
      TickSeries next;
      next.reserve(day_ticks.size() - removed);
      for (std::size_t k = 0; k < day_ticks.size(); ++k) {
        if (keep[k]) next.push_back(std::move(day_ticks[k]));
      }
      day_ticks = std::move(next);
    }
    for (auto& t : day_ticks) out.push_back(std::move(t));
    i = j;
  }
  report.output = out.size();
  return result;
}

std::chrono::year_month_day local_date(TimestampNs ts, std::chrono::minutes utc_offset) {
  return std::chrono::year_month_day{
      std::chrono::sys_days{days{floor_div(local_ns(ts, utc_offset), kNsPerDay)}}};
}

std::vector<DaySession> to_daily_sessions(std::span<const Tick> clean, std::chrono::minutes utc_offset,
                                          std::size_t min_ticks) {
  std::map<std::int64_t, TickSeries> by_day;
  for (const Tick& t : clean) {
    by_day[floor_div(local_ns(t.timestamp, utc_offset), kNsPerDay)].push_back(t);
  }
  std::vector<DaySession> sessions;
  sessions.reserve(by_day.size());
  for (auto& [day, ticks] : by_day) {
    DaySession s;
    s.date = std::chrono::year_month_day{std::chrono::sys_days{days{day}}};
    s.insufficient = ticks.size() < min_ticks;
    std::stable_sort(ticks.begin(), ticks.end(),
                     [](const Tick& a, const Tick& b) { return a.timestamp < b.timestamp; });
    s.ticks = std::move(ticks);
    sessions.push_back(std::move(s));
  }
  return sessions;
}

void write_ticks(std::ostream& out, std::span<const Tick> ticks) {
  out << "timestamp,price,size,exchange,cond\n";
  char buf[64];
  for (const Tick& t : ticks) {
    const auto res = std::to_chars(buf, buf + sizeof buf, t.price);
    out << format_timestamp(t.timestamp) << ',' << std::string_view(buf, res.ptr) << ',' << t.size
        << ',' << t.exchange << ',' << t.sale_condition << '\n';
  }
}

}  // namespace cvhar::ingest
