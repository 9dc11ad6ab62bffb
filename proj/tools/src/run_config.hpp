#pragma once

#include <map>
#include <string>
#include <vector>

namespace tca::cli {

// One accepted configuration key: flat `key = value` in a config file or
// `--key value` on the command line, command-line winning.
struct KeySpec {
  std::string name;
  std::string type;     // "string" | "int" | "double" | "bool"
  std::string fallback; // empty means unset/required-by-command
  std::string help;
};

// Fully resolved flat configuration for one subcommand.
class RunConfig {
 public:
  RunConfig(std::string command, std::vector<KeySpec> keys);

  // Layering: defaults, then the config file (if any), then overrides.
  void load_file(const std::string& path);
  void set_override(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;  // ConfigError if unset
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  // `key = value` lines, sorted by key, one per resolved entry.
  std::string resolved_text() const;
  std::string help_text() const;
  const std::string& command() const { return command_; }

 private:
  const KeySpec& spec_for(const std::string& key) const;  // ConfigError on unknown
  void validate_value(const KeySpec& spec, const std::string& value) const;

  std::string command_;
  std::vector<KeySpec> keys_;
  std::map<std::string, std::string> values_;
};

RunConfig make_run_config(const std::string& command);  // ConfigError on unknown command

}  // namespace tca::cli
