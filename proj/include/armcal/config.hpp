#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "armcal/ensemble.hpp"
#include "armcal/scenario.hpp"

namespace armcal {

/// `key = value` lines grouped under `[section]` headers. `#` and `;` start
/// comments. Every entry remembers its line so errors can point at it.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };

  static IniDocument parse(const std::string& text, const std::filesystem::path& origin);
  static IniDocument load(const std::filesystem::path& path);

  const std::filesystem::path& origin() const { return origin_; }
  /// Keys outside any section live under "".
  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }
  const Entry* find(const std::string& section, const std::string& key) const;

 private:
  std::filesystem::path origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Robot file: six lines `linkN = a d theta_offset alpha` (mm, mm, rad, rad).
DHChain read_robot_file(const std::filesystem::path& path);
void write_robot_file(const std::filesystem::path& path, const DHChain& chain);

struct RunConfig {
  std::optional<std::filesystem::path> robot_file;  // unset: built-in arm
  DHChain nominal = default_nominal_chain();
  CableEncoderModel encoder = default_encoder();
  ScenarioOptions scenario;
  std::uint64_t split_seed = 1;
  MethodSettings methods;
  EnsembleOptions ensemble;
  std::filesystem::path output_directory = ".";
};

/// Built-in defaults overlaid with the file's entries. Unknown sections or
/// keys and malformed values raise ParseError with the offending line.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from(const IniDocument& doc);

/// Environment variable naming the config file used when none is given.
inline constexpr const char* kConfigEnvironmentVariable = "ARMCAL_CONFIG";

}  // namespace armcal
