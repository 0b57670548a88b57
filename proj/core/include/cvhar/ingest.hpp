#pragma once

// Trade-file parsing, tick cleaning and partitioning into trading days.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvhar::ingest {

/// Nanoseconds since the Unix epoch (UTC).
using TimestampNs = std::int64_t;

struct Tick {
  TimestampNs timestamp = 0;
  double price = 0.0;
  std::int64_t size = 0;
  std::string exchange;
  std::string sale_condition;
};

using TickSeries = std::vector<Tick>;

/// Header names of the input CSV columns. Exchange and condition columns
/// are optional in the file; missing ones parse as empty strings.
struct ColumnMapping {
  std::string timestamp = "timestamp";
  std::string price = "price";
  std::string size = "size";
  std::string exchange = "exchange";
  std::string condition = "cond";
  char delimiter = ',';
};

struct ParseResult {
  TickSeries ticks;  // sorted by timestamp (stable)
  std::size_t rows_read = 0;
  std::size_t malformed_rows = 0;
};

ParseResult parse_ticks(const std::filesystem::path& path, const ColumnMapping& columns = {});
ParseResult parse_ticks(std::istream& in, const ColumnMapping& columns = {});

/// Accepts epoch nanoseconds ("1325601000000000000") or ISO-8601
/// ("2012-01-03T09:30:00.125", a space separator and trailing 'Z' also work).
std::optional<TimestampNs> parse_timestamp(std::string_view text);
std::string format_timestamp(TimestampNs ts);

struct CleaningConfig {
  std::chrono::minutes session_open{9 * 60 + 30};
  std::chrono::minutes session_close{16 * 60};
  // Added to UTC timestamps to obtain exchange-local wall-clock time.
  std::chrono::minutes utc_offset{0};
  std::optional<std::string> keep_exchange;
  std::set<std::string> bad_condition_codes;
  double mad_multiplier = 10.0;
  std::chrono::nanoseconds mad_window{std::chrono::minutes{2}};

  void validate() const;
};

struct CleaningReport {
  std::size_t input = 0;
  std::size_t outside_session = 0;
  std::size_t zero_price = 0;
  std::size_t other_exchange = 0;
  std::size_t bad_condition = 0;
  std::size_t merged_same_timestamp = 0;
  std::size_t mad_outliers = 0;
  std::size_t output = 0;

  std::size_t removed() const {
    return outside_session + zero_price + other_exchange + bad_condition +
           merged_same_timestamp + mad_outliers;
  }
};

struct CleaningResult {
  TickSeries ticks;
  CleaningReport report;
};

/// Applies, in order: session-hours filter, zero-price drop, exchange
/// filter, sale-condition filter, same-timestamp median aggregation and
/// MAD outlier removal. The MAD rule is repeated until no tick is removed,
/// which makes the whole pipeline idempotent.
CleaningResult clean_ticks(std::span<const Tick> raw, const CleaningConfig& cfg);

/// True when any whitespace-separated token of `condition` is a bad code,
/// or when a single-character bad code appears anywhere in it (TAQ packs
/// one-letter conditions together, e.g. "@FT").
bool has_bad_condition(std::string_view condition, const std::set<std::string>& bad_codes);

struct DaySession {
  std::chrono::year_month_day date;
  TickSeries ticks;
  bool insufficient = false;
};

std::vector<DaySession> to_daily_sessions(std::span<const Tick> clean,
                                          std::chrono::minutes utc_offset = std::chrono::minutes{0},
                                          std::size_t min_ticks = 20);

std::chrono::year_month_day local_date(TimestampNs ts, std::chrono::minutes utc_offset);

void write_ticks(std::ostream& out, std::span<const Tick> ticks);

}  // namespace cvhar::ingest
