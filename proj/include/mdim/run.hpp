#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/complex.hpp"

namespace mdim {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

const std::vector<std::string>& known_commands();
bool command_needs_seed(const std::string& command);

struct RunConfig {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  bool strict = false;
  std::size_t cap = kDefaultSimplexCap;

  /// Canonical form hashed into config_hash.
  nlohmann::json canonical() const;
};

/// FNV-1a 64 of the canonical serialized config, hex.
std::string config_hash(const RunConfig& c);

struct CsvRow {
  std::string n;
  std::string value;
};

struct ResultRecord {
  std::string run_id;
  std::string timestamp;  // UTC, ISO 8601
  std::string command;
  std::string config_hash;
  std::string version = kToolVersion;
  int schema = kSchemaVersion;
  nlohmann::json config;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static ResultRecord from_json(const nlohmann::json& j);
};

struct RunOutput {
  ResultRecord record;
  std::vector<CsvRow> csv;
};

/// Executes one command. Throws UsageError / CapError / UnsupportedError.
RunOutput run(const RunConfig& config);

/// Writes "n,value,config_hash" rows (header included when the file is new).
void write_csv(const std::string& path, const RunOutput& out);

}  // namespace mdim
