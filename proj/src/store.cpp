#include "mdim/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "mdim/errors.hpp"

namespace mdim {

void store_append(const std::string& path, const ResultRecord& r) {
  const std::string line = r.to_json().dump() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw UsageError("cannot open store " + path + ": " + std::strerror(errno));
  const ssize_t w = ::write(fd, line.data(), line.size());
  ::close(fd);
  if (w != static_cast<ssize_t>(line.size())) throw std::runtime_error("short write to store " + path);
}

std::vector<ResultRecord> store_query(const std::string& path, const StoreFilter& f, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read store " + path);
  std::vector<ResultRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ResultRecord r;
    try {
      r = ResultRecord::from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      if (warnings) warnings->push_back("store line " + std::to_string(lineno) + " skipped: " + e.what());
      continue;
    }
    if (f.run_id && r.run_id != *f.run_id) continue;
    if (f.command && r.command != *f.command) continue;
    if (f.config_hash && r.config_hash != *f.config_hash) continue;
    if (f.since && r.timestamp.compare(0, f.since->size(), *f.since) < 0) continue;
    if (f.until && r.timestamp.compare(0, f.until->size(), *f.until) > 0) continue;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mdim
