#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seabed {

// Flat sectioned key = value text. Section and key names are validated
// against the known schema; anything unknown is a ConfigError that names
// the stray entry.
class ExperimentConfig {
public:
  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key) const;
  int integer_or(const std::string& section, const std::string& key, int fallback) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> number_list_or(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

private:
  void validate() const;
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace seabed
