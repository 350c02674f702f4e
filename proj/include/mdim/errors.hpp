#pragma once

#include <stdexcept>
#include <string>

namespace mdim {

// Exit codes of the CLI mirror these categories: usage/validation -> 2,
// size cap -> 3, anything else -> 4.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

class CapError : public std::length_error {
 public:
  explicit CapError(const std::string& what) : std::length_error(what) {}
};

class UnsupportedError : public std::logic_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace mdim
