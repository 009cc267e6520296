#include "lcgf/io/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "lcgf/errors.hpp"

namespace lcgf {

std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw ParameterError("cannot format double");
  return {buf, end};
}

void ExperimentConfig::set(const std::string& section, const std::string& key, std::string value) {
  if (key.empty()) throw ParameterError("empty config key");
  if (section.empty() && key == "schema_version") {
    schema_version_ = std::stoi(value);
    return;
  }
  sections_[section][key] = std::move(value);
}

void ExperimentConfig::set(const std::string& section, const std::string& key, double value) {
  set(section, key, format_double(value));
}

void ExperimentConfig::set(const std::string& section, const std::string& key, std::int64_t value) {
  set(section, key, std::to_string(value));
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

const std::string& ExperimentConfig::get(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.count(key))
    throw ParameterError("missing config key " + section + "." + key);
  return it->second.at(key);
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key) const {
  const auto& s = get(section, key);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParameterError("bad number for " + key + ": " + s);
  return x;
}

std::int64_t ExperimentConfig::get_int(const std::string& section, const std::string& key) const {
  const auto& s = get(section, key);
  std::int64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParameterError("bad integer for " + key + ": " + s);
  return x;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "schema_version=" << schema_version_ << "\n";
  auto emit = [&](const Section& section) {
    for (const auto& [key, value] : section) out << key << "=\"" << value << "\"\n";
  };
  if (auto it = sections_.find(""); it != sections_.end()) emit(it->second);
  for (const auto& [name, section] : sections_) {
    if (name.empty()) continue;
    out << "[" << name << "]\n";
    emit(section);
  }
  return out.str();
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version_;
  for (const auto& [name, section] : sections_)
    for (const auto& [key, value] : section) (name.empty() ? j[key] : j[name][key]) = value;
  return j;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    std::string section;
    for (const auto& p : item.parents) section += (section.empty() ? "" : ".") + p;
    std::string value;
    for (const auto& s : item.inputs) value += (value.empty() ? "" : " ") + s;
    config.set(section, item.name, value);
  }
  return config;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config " + path);
  return parse(in);
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write " + path);
  out << to_text();
}

}  // namespace lcgf
