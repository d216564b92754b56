#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace packetvision::config {

/// The subset of TOML used by build configs: top-level key/value pairs,
/// [table] headers, and [[array-of-tables]] headers, with string, integer,
/// float and boolean values. Inline tables, arrays and dotted keys are
/// rejected with InvalidConfig.
using Value = std::variant<std::string, std::int64_t, double, bool>;
using Table = std::map<std::string, Value, std::less<>>;

struct Document {
  Table root;
  std::map<std::string, Table, std::less<>> tables;
  std::map<std::string, std::vector<Table>, std::less<>> table_arrays;
};

Document parse_toml(std::string_view text);

struct InputSpec {
  std::filesystem::path path;  // as written in the config
  std::string label;
  std::optional<std::uint64_t> max_packets;
};

struct BuildConfig {
  std::vector<InputSpec> inputs;
  std::filesystem::path output_dir;
  std::uint64_t global_seed = 0;
  double lambda = 8.0;
  /// Relative input and output paths are resolved against this directory.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
};

/// Throws InvalidConfig when the config cannot be built from.
void validate(const BuildConfig& config);

BuildConfig parse_build_config(std::string_view toml_text,
                               const std::filesystem::path& base_dir = {});

/// Reads and validates a config file; paths resolve against its directory.
BuildConfig load_build_config(const std::filesystem::path& path);

}  // namespace packetvision::config
