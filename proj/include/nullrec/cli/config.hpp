#pragma once

// Experiment configuration: a flat `key = value` text format with
// `[experiment.<name>]` sections. '#' starts a comment. Keys before the first
// section are global (seed, plots). Every error names the file and line.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nullrec/errors.hpp"

namespace nullrec::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::map<std::string, ConfigEntry> entries;
};

struct ConfigFile {
  std::string path;
  std::map<std::string, ConfigEntry> globals;
  std::vector<ConfigSection> sections;
};

[[nodiscard]] ConfigFile parse_config_text(const std::string& text, const std::string& path);
[[nodiscard]] ConfigFile parse_config(const std::string& path);

enum class ValueType { integer, real, boolean, text, real_list, choice };

struct FieldSpec {
  std::string key;
  ValueType type = ValueType::real;
  /// Default in config syntax; empty means required, "none" means optional.
  std::string default_value;
  std::string help;
  std::optional<double> min;  // inclusive bounds for numbers and list entries
  std::optional<double> max;
  bool min_exclusive = false;
  bool max_exclusive = false;
  std::vector<std::string> choices;
};

struct KindSpec {
  std::string kind;
  std::string summary;
  /// What the experiment verifies, stated as the mathematical claim.
  std::string verifies;
  std::vector<FieldSpec> fields;
};

using ParamValue = std::variant<long long, double, bool, std::string, std::vector<double>>;

/// Validated, typed parameters of one experiment section.
class Params {
 public:
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] long long integer(const std::string& key) const;
  [[nodiscard]] std::size_t count(const std::string& key) const;
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] std::optional<double> optional_real(const std::string& key) const;
  [[nodiscard]] bool boolean(const std::string& key) const;
  [[nodiscard]] const std::string& text(const std::string& key) const;
  [[nodiscard]] const std::vector<double>& list(const std::string& key) const;
  /// "file:line" where the key was set, or "default".
  [[nodiscard]] std::string origin(const std::string& key) const;

  void set(const std::string& key, ParamValue value, std::string origin);

 private:
  const ParamValue& at(const std::string& key) const;
  std::map<std::string, ParamValue> values_;
  std::map<std::string, std::string> origins_;
};

/// Parses one value against its field spec; `where` prefixes error messages.
[[nodiscard]] ParamValue parse_value(const FieldSpec& field, const std::string& raw,
                                     const std::string& where);

/// Validates a section against its kind's schema (the `kind` key selects it).
[[nodiscard]] Params validate_section(const ConfigSection& section, const KindSpec& spec,
                                      const std::string& path);

struct GlobalSettings {
  std::uint64_t seed = 20240601;
  bool plots = true;
};

[[nodiscard]] GlobalSettings validate_globals(const ConfigFile& config);

[[nodiscard]] std::string type_name(ValueType type);

}  // namespace nullrec::cli
