#include "seabed/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "seabed/errors.hpp"
#include "seabed/expr.hpp"

namespace seabed {
namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"a1", "a2", "n", "n_sigma"}},
      {"physics",
       {"gravity", "depth_floor", "solver_method", "solver_tol", "solver_max_iters",
        "conserve_mean"}},
      {"profiles", {"bottom", "bottom0", "surface", "surface0", "psi", "psi0", "b_init"}},
      {"time", {"dt", "t_end", "t0"}},
      {"window", {"a1", "a2"}},
      {"certificate", {"c_big", "c_small", "s", "epsilons", "raster_refine", "delta_psi"}},
      {"inversion",
       {"alpha", "max_iters", "grad_tol", "fd_step", "lbfgs_memory", "noise_levels"}},
      {"output", {"trajectory_stride"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": entry before any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.sections_[section][key] = value;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

void ExperimentConfig::validate() const {
  for (const auto& [section, entries] : sections_) {
    auto it = schema().find(section);
    if (it == schema().end())
      throw ConfigError(origin_ + ": unknown section [" + section + "]");
    for (const auto& [key, value] : entries) {
      (void)value;
      if (!it->second.count(key))
        throw ConfigError(origin_ + ": unknown key '" + key + "' in section [" + section + "]");
    }
  }
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.count(key))
    throw ConfigError(origin_ + ": missing required key '" + key + "' in section [" + section +
                      "]");
  return it->second.at(key);
}

std::string ExperimentConfig::get_or(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double ExperimentConfig::number(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    return Expression::parse(v)(0.0);
  } catch (const ConfigError&) {
    throw ConfigError(origin_ + ": key '" + key + "' in [" + section + "] is not a number: " + v);
  }
}

double ExperimentConfig::number_or(const std::string& section, const std::string& key,
                                   double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

int ExperimentConfig::integer(const std::string& section, const std::string& key) const {
  const double v = number(section, key);
  const int i = static_cast<int>(std::llround(v));
  if (std::abs(v - i) > 1e-9)
    throw ConfigError(origin_ + ": key '" + key + "' in [" + section + "] must be an integer");
  return i;
}

int ExperimentConfig::integer_or(const std::string& section, const std::string& key,
                                 int fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

bool ExperimentConfig::flag_or(const std::string& section, const std::string& key,
                               bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(origin_ + ": key '" + key + "' in [" + section + "] must be a boolean");
}

std::vector<double> ExperimentConfig::number_list_or(const std::string& section,
                                                     const std::string& key,
                                                     const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(Expression::parse(item)(0.0));
  }
  if (out.empty())
    throw ConfigError(origin_ + ": key '" + key + "' in [" + section + "] has no entries");
  return out;
}

}  // namespace seabed
