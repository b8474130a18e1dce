#pragma once
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "calderon/experiments.hpp"

namespace calderon::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentInfo {
  std::string id, description, anchor;
};
// Stable order.
const std::vector<ExperimentInfo>& catalog();

enum class ValueType { Int, Real, Bool, Text, RealList, IntList };

struct KeyInfo {
  std::string name;
  ValueType type;
  std::string fallback;
  std::vector<std::string> sections;  // sections that may set the key; the first one owns it in dumps
  std::string help;
};
const std::vector<KeyInfo>& known_keys();

// Every key holds a normalized string; defaults are filled in at construction.
class RunConfig {
 public:
  RunConfig();

  // Parses "key = value" lines with optional [section] headers; '#' starts a comment.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  // Throws ConfigError naming the key for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value, const std::string& section = "");
  std::string dump() const;

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long> integers(const std::string& key) const;

  bool operator==(const RunConfig& o) const { return values_ == o.values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Runs the configured experiment and returns its record. Nothing is written to disk.
ExperimentRecord execute(const RunConfig& cfg);

}  // namespace calderon::cli
