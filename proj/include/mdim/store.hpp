#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdim/run.hpp"

namespace mdim {

/// Appends one record as a single line (one write call).
void store_append(const std::string& path, const ResultRecord& r);

struct StoreFilter {
  std::optional<std::string> run_id;
  std::optional<std::string> command;
  std::optional<std::string> config_hash;
  std::optional<std::string> since;  // inclusive, compared on the ISO timestamp prefix
  std::optional<std::string> until;  // inclusive
};

/// Corrupt lines are skipped; a warning per line goes to `warnings`.
std::vector<ResultRecord> store_query(const std::string& path, const StoreFilter& f,
                                      std::vector<std::string>* warnings = nullptr);

}  // namespace mdim
