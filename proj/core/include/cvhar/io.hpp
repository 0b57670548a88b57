#pragma once

// CSV and JSON serialisation of series, fitted models and reports.
// Doubles are written in shortest round-trip form so outputs are
// byte-reproducible and reload losslessly.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvhar/evaluate.hpp"
#include "cvhar/har.hpp"
#include "cvhar/ingest.hpp"
#include "cvhar/margins.hpp"
#include "cvhar/realized.hpp"
#include "cvhar/vine.hpp"

namespace cvhar::io {

std::string format_double(double x);
std::string format_date(std::chrono::year_month_day d);
/// "YYYY-MM-DD"; throws IoError on malformed text.
std::chrono::year_month_day parse_date(std::string_view text);

void write_rk_csv(std::ostream& out, std::span<const realized::RkEstimate> rk);
std::vector<realized::RkEstimate> read_rk_csv(std::istream& in);

void write_components_csv(std::ostream& out, std::span<const realized::ComponentRow> rows);
realized::RkComponentSeries read_components_csv(std::istream& in);
realized::RkComponentSeries read_components_csv(const std::filesystem::path& path);

void write_forecasts_csv(std::ostream& out, std::span<const eval::ForecastRecord> records);
std::vector<eval::ForecastRecord> read_forecasts_csv(std::istream& in);

std::string to_json(const ingest::CleaningReport& report);
std::string to_json(const margins::Margin& margin);
std::string to_json(const copula::PairCopula& c);
std::string to_json(const vine::CVineModel& model);
std::string to_json(const har::HarModel& model);
/// `config_echo` (key = value text) is embedded verbatim when non-empty.
std::string to_json(const eval::EvalReport& report, std::string_view config_echo = {});

/// Margins, vine and HAR together: everything a forecast needs.
std::string to_json(const eval::FittedModels& model);
eval::FittedModels fitted_models_from_json(std::string_view text);

margins::Margin margin_from_json(std::string_view text);
copula::PairCopula pair_copula_from_json(std::string_view text);
vine::CVineModel vine_from_json(std::string_view text);
har::HarModel har_from_json(std::string_view text);

/// Measures table: one row per (label, panel), columns MSE..MDA for HAR,
/// CV-HAR and their ratio.
struct LabelledReport {
  std::string label;  // e.g. "E-AGT"
  eval::EvalReport report;
};
void write_measures_csv(std::ostream& out, std::span<const LabelledReport> reports);
/// Tests table: statistic, p-value and stars per loss and test.
void write_tests_csv(std::ostream& out, std::span<const LabelledReport> reports);

/// Reads a whole file; throws IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Throws IoError when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cvhar::io
