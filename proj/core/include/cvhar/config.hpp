#pragma once

// Run configuration in a line-oriented "key = value" format. Every field
// has a default; to_text() writes every key so a resolved configuration
// reloads to an identical object.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cvhar/evaluate.hpp"
#include "cvhar/ingest.hpp"
#include "cvhar/realized.hpp"

namespace cvhar::config {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string output_dir = "out";
  std::uint64_t seed = 42;

  ingest::ColumnMapping columns{};
  ingest::CleaningConfig cleaning{};
  std::size_t min_day_ticks = 20;
  realized::BandwidthConfig bandwidth{};
  eval::SchemeConfig scheme{};
};

/// Lines are "key = value"; '#' starts a comment. Unknown keys and bad
/// values throw ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

std::string to_text(const RunConfig& cfg);

/// Applies a single "key=value" assignment on top of `cfg`.
void apply_override(RunConfig& cfg, std::string_view assignment);
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// All recognised keys, in output order.
std::vector<std::string> config_keys();

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace cvhar::config
