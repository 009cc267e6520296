#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

namespace lcgf {

constexpr int kSchemaVersion = 1;

/// Flat key = value text grouped in [sections]. Values are kept as strings so
/// that a parse/serialize cycle is lossless.
class ExperimentConfig {
 public:
  using Section = std::map<std::string, std::string>;

  void set(const std::string& section, const std::string& key, std::string value);
  void set(const std::string& section, const std::string& key, double value);
  void set(const std::string& section, const std::string& key, std::int64_t value);
  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;

  const std::map<std::string, Section>& sections() const noexcept { return sections_; }
  int schema_version() const noexcept { return schema_version_; }

  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  void save(const std::string& path) const;

  bool operator==(const ExperimentConfig&) const = default;

 private:
  int schema_version_ = kSchemaVersion;
  std::map<std::string, Section> sections_;
};

/// Shortest decimal form that reads back to the same double (17 significant digits at most).
std::string format_double(double x);

}  // namespace lcgf
