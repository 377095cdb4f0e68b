#include "nullrec/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

namespace nullrec::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where_of(const std::string& path, int line, const std::string& key) {
  std::ostringstream os;
  os << path << ":" << line << ": " << key;
  return os.str();
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double parse_number(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) fail(where, "expected a number, got an empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    fail(where, "expected a finite number, got '" + s + "'");
  }
  return v;
}

void check_range(const FieldSpec& f, double v, const std::string& where) {
  std::ostringstream os;
  if (f.min && (f.min_exclusive ? v <= *f.min : v < *f.min)) {
    os << "must be " << (f.min_exclusive ? "> " : ">= ") << *f.min << ", got " << v;
    fail(where, os.str());
  }
  if (f.max && (f.max_exclusive ? v >= *f.max : v > *f.max)) {
    os << "must be " << (f.max_exclusive ? "< " : "<= ") << *f.max << ", got " << v;
    fail(where, os.str());
  }
}

}  // namespace

ConfigFile parse_config_text(const std::string& text, const std::string& path) {
  static const std::regex section_re(R"(\[experiment\.([A-Za-z0-9_\-]+)\])");
  static const std::regex key_re(R"([A-Za-z][A-Za-z0-9_.\-]*)");
  ConfigFile cfg;
  cfg.path = path;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  ConfigSection* current = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string here = path + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      std::smatch m;
      if (!std::regex_match(line, m, section_re)) {
        throw ConfigError(here + ": malformed section header '" + line +
                          "', expected [experiment.<name>]");
      }
      const std::string name = m[1];
      for (const auto& s : cfg.sections) {
        if (s.name == name) {
          throw ConfigError(here + ": duplicate experiment '" + name + "' (first defined on line " +
                            std::to_string(s.line) + ")");
        }
      }
      cfg.sections.push_back({name, line_no, {}});
      current = &cfg.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(here + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!std::regex_match(key, key_re)) throw ConfigError(here + ": invalid key '" + key + "'");
    auto& target = current ? current->entries : cfg.globals;
    if (const auto it = target.find(key); it != target.end()) {
      throw ConfigError(here + ": " + key + ": duplicate key (first set on line " +
                        std::to_string(it->second.line) + ")");
    }
    target[key] = {value, line_no};
  }
  if (cfg.sections.empty()) throw ConfigError(path + ": no [experiment.<name>] sections");
  return cfg;
}

ConfigFile parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config_text(os.str(), path);
}

std::string type_name(ValueType type) {
  switch (type) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::boolean: return "boolean";
    case ValueType::text: return "text";
    case ValueType::real_list: return "list of reals";
    case ValueType::choice: return "choice";
  }
  return "?";
}

ParamValue parse_value(const FieldSpec& f, const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  switch (f.type) {
    case ValueType::integer: {
      const double v = parse_number(s, where);
      if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(where, "expected an integer, got '" + s + "'");
      check_range(f, v, where);
      return static_cast<long long>(v);
    }
    case ValueType::real: {
      const double v = parse_number(s, where);
      check_range(f, v, where);
      return v;
    }
    case ValueType::boolean: {
      std::string l = s;
      std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
      if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
      if (l == "false" || l == "no" || l == "off" || l == "0") return false;
      fail(where, "expected true or false, got '" + s + "'");
    }
    case ValueType::text:
      if (s.empty()) fail(where, "must not be empty");
      return s;
    case ValueType::choice: {
      if (std::find(f.choices.begin(), f.choices.end(), s) == f.choices.end()) {
        std::string opts;
        for (const auto& c : f.choices) opts += (opts.empty() ? "" : ", ") + c;
        fail(where, "must be one of {" + opts + "}, got '" + s + "'");
      }
      return s;
    }
    case ValueType::real_list: {
      std::vector<double> out;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const double v = parse_number(item, where);
        check_range(f, v, where);
        out.push_back(v);
      }
      if (out.empty()) fail(where, "expected a comma-separated list of numbers");
      return out;
    }
  }
  fail(where, "unsupported field type");
}

void Params::set(const std::string& key, ParamValue value, std::string origin) {
  values_[key] = std::move(value);
  origins_[key] = std::move(origin);
}

const ParamValue& Params::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ParameterError("parameter '" + key + "' is not set");
  return it->second;
}

long long Params::integer(const std::string& key) const { return std::get<long long>(at(key)); }

std::size_t Params::count(const std::string& key) const {
  const long long v = integer(key);
  if (v < 0) throw ParameterError("parameter '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

double Params::real(const std::string& key) const { return std::get<double>(at(key)); }

std::optional<double> Params::optional_real(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return real(key);
}

bool Params::boolean(const std::string& key) const { return std::get<bool>(at(key)); }

const std::string& Params::text(const std::string& key) const {
  return std::get<std::string>(at(key));
}

const std::vector<double>& Params::list(const std::string& key) const {
  return std::get<std::vector<double>>(at(key));
}

std::string Params::origin(const std::string& key) const {
  const auto it = origins_.find(key);
  return it == origins_.end() ? "unset" : it->second;
}

Params validate_section(const ConfigSection& section, const KindSpec& spec, const std::string& path) {
  Params p;
  for (const auto& [key, entry] : section.entries) {
    if (key == "kind") continue;
    const auto it = std::find_if(spec.fields.begin(), spec.fields.end(),
                                 [&](const FieldSpec& f) { return f.key == key; });
    if (it == spec.fields.end()) {
      fail(where_of(path, entry.line, key), "unknown key for kind '" + spec.kind + "'");
    }
    p.set(key, parse_value(*it, entry.value, where_of(path, entry.line, key)),
          path + ":" + std::to_string(entry.line));
  }
  for (const auto& f : spec.fields) {
    if (p.has(f.key)) continue;
    if (f.default_value.empty()) {
      fail(where_of(path, section.line, "[experiment." + section.name + "]"),
           "missing required key '" + f.key + "'");
    }
    if (f.default_value == "none") continue;
    p.set(f.key, parse_value(f, f.default_value, "default of " + f.key), "default");
  }
  return p;
}

GlobalSettings validate_globals(const ConfigFile& config) {
  GlobalSettings g;
  for (const auto& [key, entry] : config.globals) {
    const std::string where = where_of(config.path, entry.line, key);
    if (key == "seed") {
      const std::string s = trim(entry.value);
      if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        fail(where, "expected a nonnegative 64-bit integer, got '" + s + "'");
      }
      errno = 0;
      const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
      if (errno == ERANGE) fail(where, "seed does not fit in 64 bits");
      g.seed = v;
    } else if (key == "plots") {
      FieldSpec f;
      f.key = "plots";
      f.type = ValueType::boolean;
      g.plots = std::get<bool>(parse_value(f, entry.value, where));
    } else {
      fail(where, "unknown global key (allowed: seed, plots)");
    }
  }
  return g;
}

}  // namespace nullrec::cli
