#include <gtest/gtest.h>

#include <sstream>

#include "cvhar/error.hpp"
#include "cvhar/ingest.hpp"

using namespace cvhar;
using namespace cvhar::ingest;

namespace {

TimestampNs at(const char* text) { return *parse_timestamp(text); }

Tick tick(const char* ts, double price, std::string exchange = "D", std::string cond = "") {
  return Tick{at(ts), price, 100, std::move(exchange), std::move(cond)};
}

}  // namespace

TEST(ParseTicks, ThreeRows) {
  std::istringstream in(
      "timestamp,price,size,exchange,cond\n"
      "2020-01-02T10:00:00,10.5,100,D,\n"
      "2020-01-02T10:00:01.5,10.6,200,D,\n"
      "2020-01-02T10:00:03,10.4,50,N,\n");
  const auto r = parse_ticks(in);
  ASSERT_EQ(r.ticks.size(), 3u);
  EXPECT_EQ(r.malformed_rows, 0u);
  EXPECT_DOUBLE_EQ(r.ticks[1].price, 10.6);
  EXPECT_EQ(r.ticks[1].timestamp - r.ticks[0].timestamp, 1'500'000'000);
  EXPECT_EQ(r.ticks[2].exchange, "N");
}

TEST(ParseTicks, EmptyFileIsAnError) {
  std::istringstream in("");
  EXPECT_THROW(parse_ticks(in), DomainError);
}

TEST(ParseTicks, ZeroPriceKeptAtParseStage) {
  std::istringstream in(
      "timestamp,price,size\n"
      "2020-01-02T10:00:00,0.00,100\n"
      "2020-01-02T10:00:01,10,100\n"
      "garbage,row,here\n");
  const auto r = parse_ticks(in);
  EXPECT_EQ(r.ticks.size(), 2u);
  EXPECT_EQ(r.malformed_rows, 1u);
  EXPECT_EQ(r.ticks[0].price, 0.0);
}

TEST(ParseTicks, SortsByTimestamp) {
  std::istringstream in(
      "timestamp,price\n"
      "2020-01-02T10:00:05,2\n"
      "2020-01-02T10:00:01,1\n");
  const auto r = parse_ticks(in);
  EXPECT_EQ(r.ticks[0].price, 1.0);
}

TEST(ParseTicks, MissingFile) { EXPECT_THROW(parse_ticks(std::filesystem::path("/nonexistent/x.csv")), IoError); }

TEST(Timestamp, RoundTrip) {
  const auto ts = at("2018-06-29T15:59:59.123456789");
  EXPECT_EQ(format_timestamp(ts), "2018-06-29T15:59:59.123456789");
  EXPECT_FALSE(parse_timestamp("2018-13-01T00:00:00").has_value());
  EXPECT_FALSE(parse_timestamp("yesterday").has_value());
}

TEST(Clean, SameTimestampMedian) {
  std::vector<Tick> raw{tick("2020-01-02T10:00:00", 10), tick("2020-01-02T10:00:00", 11),
                        tick("2020-01-02T10:00:00", 30)};
  const auto r = clean_ticks(raw, {});
  ASSERT_EQ(r.ticks.size(), 1u);
  EXPECT_DOUBLE_EQ(r.ticks[0].price, 11.0);
  EXPECT_EQ(r.report.merged_same_timestamp, 2u);
}

TEST(Clean, SessionFilter) {
  std::vector<Tick> raw{tick("2020-01-02T09:15:00", 10), tick("2020-01-02T09:30:00", 10),
                        tick("2020-01-02T16:00:00", 10), tick("2020-01-02T16:00:01", 10)};
  const auto r = clean_ticks(raw, {});
  EXPECT_EQ(r.ticks.size(), 2u);
  EXPECT_EQ(r.report.outside_session, 2u);
}

TEST(Clean, UtcOffsetShiftsSession) {
  CleaningConfig cfg;
  cfg.utc_offset = std::chrono::minutes{-300};
  std::vector<Tick> raw{tick("2020-01-02T10:00:00", 10), tick("2020-01-02T15:00:00", 10)};
  const auto r = clean_ticks(raw, cfg);
  ASSERT_EQ(r.ticks.size(), 1u);
  EXPECT_EQ(r.ticks[0].timestamp, at("2020-01-02T15:00:00"));
}

TEST(Clean, ZeroPriceExchangeAndCondition) {
  CleaningConfig cfg;
  cfg.keep_exchange = "D";
  cfg.bad_condition_codes = {"Z"};
  std::vector<Tick> raw{tick("2020-01-02T10:00:00", 0), tick("2020-01-02T10:00:01", 10, "N"),
                        tick("2020-01-02T10:00:02", 10, "D", "@ Z"), tick("2020-01-02T10:00:03", 10, "D", "@")};
  const auto r = clean_ticks(raw, cfg);
  EXPECT_EQ(r.report.zero_price, 1u);
  EXPECT_EQ(r.report.other_exchange, 1u);
  EXPECT_EQ(r.report.bad_condition, 1u);
  EXPECT_EQ(r.report.output, 1u);
  EXPECT_EQ(r.report.input, r.report.output + r.report.removed());
}

TEST(Clean, MadSpikeRemoved) {
  // flat 100 every 10 s for ten minutes, one print at 20x the level
  std::vector<Tick> raw;
  const auto t0 = at("2020-01-02T11:00:00");
  for (int i = 0; i < 60; ++i) {
    raw.push_back(Tick{t0 + i * 10'000'000'000LL, i == 30 ? 2000.0 : 100.0, 100, "D", ""});
  }
  const auto r = clean_ticks(raw, {});
  EXPECT_EQ(r.report.mad_outliers, 1u);
  EXPECT_EQ(r.ticks.size(), 59u);
  for (const auto& t : r.ticks) EXPECT_EQ(t.price, 100.0);
}

TEST(Clean, MadKeepsSmoothTrend) {
  std::vector<Tick> raw;
  const auto t0 = at("2020-01-02T11:00:00");
  for (int i = 0; i < 100; ++i) raw.push_back(Tick{t0 + i * 5'000'000'000LL, 100.0 + 0.01 * i, 1, "D", ""});
  EXPECT_EQ(clean_ticks(raw, {}).report.mad_outliers, 0u);
}

TEST(Clean, InvalidConfig) {
  CleaningConfig cfg;
  cfg.mad_multiplier = 0.0;
  EXPECT_THROW(clean_ticks({}, cfg), ConfigError);
}

TEST(BadCondition, Tokens) {
  EXPECT_TRUE(has_bad_condition("@ T", {"T"}));
  EXPECT_FALSE(has_bad_condition("@", {"T"}));
  EXPECT_FALSE(has_bad_condition("", {"T"}));
}

TEST(Sessions, SplitsByDate) {
  std::vector<Tick> ticks;
  for (int i = 0; i < 25; ++i) ticks.push_back(Tick{at("2020-01-02T10:00:00") + i * 1'000'000'000LL, 10, 1, "D", ""});
  for (int i = 0; i < 5; ++i) ticks.push_back(Tick{at("2020-01-03T10:00:00") + i * 1'000'000'000LL, 10, 1, "D", ""});
  const auto days = to_daily_sessions(ticks, std::chrono::minutes{0}, 20);
  ASSERT_EQ(days.size(), 2u);
  EXPECT_FALSE(days[0].insufficient);
  EXPECT_TRUE(days[1].insufficient);
  EXPECT_EQ(days[1].date, std::chrono::year_month_day(std::chrono::year{2020}, std::chrono::month{1},
                                                      std::chrono::day{3}));
  EXPECT_TRUE(to_daily_sessions({}, std::chrono::minutes{0}, 20).empty());
}

TEST(Sessions, WriteTicksReparses) {
  std::vector<Tick> ticks{tick("2020-01-02T10:00:00.25", 10.125, "D", "@")};
  std::stringstream s;
  write_ticks(s, ticks);
  const auto back = parse_ticks(s);
  ASSERT_EQ(back.ticks.size(), 1u);
  EXPECT_EQ(back.ticks[0].timestamp, ticks[0].timestamp);
  EXPECT_EQ(back.ticks[0].price, 10.125);
  EXPECT_EQ(back.ticks[0].sale_condition, "@");
}
