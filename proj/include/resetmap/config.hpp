// config.hpp — flat-sectioned text configuration for the command-line tool.
// Sections: [model], [bath], [protocol], [grid], [output]. Unknown sections or
// keys are hard errors with line diagnostics: a typo in a physics parameter
// must never silently fall back to a default.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "resetmap/errors.hpp"
#include "resetmap/model.hpp"
#include "resetmap/spdm.hpp"

namespace resetmap {

enum class ProtocolType { ri, ec, custom };
enum class GridSpacing { linear, log };

struct RunConfig {
  // [model]
  std::string kind = "single_level_chain";
  double omega0 = 0.0;
  double hopping = 1.0;     // J
  double coupling = 0.2;    // t_c
  int n_bath = 400;         // N_b
  Statistics statistics = Statistics::fermion;

  // [bath]
  std::string occupation = "empty";  // empty | fermi_dirac
  double beta = 1.0;
  double mu = 0.0;
  double sigma = -1.0;  // broadening; < 0 means "0.02 * J" resolved later

  // [protocol]
  ProtocolType protocol = ProtocolType::ri;
  // custom protocol: semicolon-separated "alpha,beta,re,im" entries
  std::string reset_pairs;

  // [grid]
  double tau_min = 0.01;
  double tau_max = 2.0;
  int tau_count = 100;
  GridSpacing spacing = GridSpacing::linear;
  double omega0_min = -6.0;
  double omega0_max = 6.0;
  int omega0_count = 1;
  double t_end = 50.0;
  double dt = 1e-3;

  // [output]
  std::string out_dir = ".";
  std::string prefix = "resetmap";

  double resolved_sigma() const { return sigma > 0 ? sigma : 0.02 * hopping; }

  void validate() const {
    auto finite = [](double x, const char* name) {
      if (!std::isfinite(x)) {
        throw ConfigError(std::string("non-finite value for ") + name);
      }
    };
    finite(omega0, "omega0");
    finite(hopping, "J");
    finite(coupling, "t_c");
    finite(beta, "beta");
    finite(mu, "mu");
    finite(tau_min, "tau_min");
    finite(tau_max, "tau_max");
    finite(omega0_min, "omega0_min");
    finite(omega0_max, "omega0_max");
    finite(t_end, "t_end");
    finite(dt, "dt");
    if (kind != "single_level_chain") {
      throw ConfigError("unsupported model kind: " + kind);
    }
    if (occupation != "empty" && occupation != "fermi_dirac") {
      throw ConfigError("unsupported occupation kind: " + occupation);
    }
    if (n_bath < 2) throw ConfigError("N_b must be >= 2");
    if (tau_count < 1 || omega0_count < 1) throw ConfigError("grid counts must be >= 1");
    if (!(tau_min > 0)) throw ConfigError("tau_min must be > 0");
    if (tau_max < tau_min) throw ConfigError("tau_max must be >= tau_min");
    if (omega0_count > 1 && omega0_max < omega0_min) {
      throw ConfigError("omega0_max must be >= omega0_min");
    }
    if (!(t_end > 0) || !(dt > 0)) throw ConfigError("t_end and dt must be > 0");
    if (protocol == ProtocolType::custom && reset_pairs.empty()) {
      throw ConfigError("custom protocol needs reset_pairs");
    }
  }

  OccupationProfile occupation_profile() const {
    if (occupation == "fermi_dirac") {
      return OccupationProfile::fermi_dirac(beta, mu);
    }
    return OccupationProfile::empty();
  }

  std::vector<double> tau_grid() const {
    std::vector<double> g(static_cast<size_t>(tau_count));
    if (tau_count == 1) {
      g[0] = tau_min;
      return g;
    }
    if (spacing == GridSpacing::log) {
      const double l0 = std::log(tau_min);
      const double l1 = std::log(tau_max);
      for (int i = 0; i < tau_count; ++i) {
        g[static_cast<size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (tau_count - 1));
      }
    } else {
      for (int i = 0; i < tau_count; ++i) {
        g[static_cast<size_t>(i)] =
            tau_min + (tau_max - tau_min) * i / (tau_count - 1);
      }
    }
    return g;
  }

  std::vector<double> omega0_grid() const {
    std::vector<double> g(static_cast<size_t>(omega0_count));
    if (omega0_count == 1) {
      g[0] = omega0;
      return g;
    }
    for (int i = 0; i < omega0_count; ++i) {
      g[static_cast<size_t>(i)] =
          omega0_min + (omega0_max - omega0_min) * i / (omega0_count - 1);
    }
    return g;
  }

  // one "section.key=value" line per setting, echoed into CSV comments so
  // every output file is self-describing
  std::vector<std::string> resolved_lines() const {
    auto num = [](double x) {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), x);
      return std::string(buf, res.ptr);
    };
    std::vector<std::string> out;
    out.push_back("model.kind=" + kind);
    out.push_back("model.omega0=" + num(omega0));
    out.push_back("model.J=" + num(hopping));
    out.push_back("model.t_c=" + num(coupling));
    out.push_back("model.N_b=" + std::to_string(n_bath));
    out.push_back(std::string("model.statistics=") +
                  (statistics == Statistics::fermion ? "fermion" : "boson"));
    out.push_back("bath.occupation=" + occupation);
    out.push_back("bath.beta=" + num(beta));
    out.push_back("bath.mu=" + num(mu));
    out.push_back("bath.sigma=" + num(resolved_sigma()));
    out.push_back(std::string("protocol.type=") +
                  (protocol == ProtocolType::ri
                       ? "ri"
                       : protocol == ProtocolType::ec ? "ec" : "custom"));
    if (!reset_pairs.empty()) out.push_back("protocol.reset_pairs=" + reset_pairs);
    out.push_back("grid.tau_min=" + num(tau_min));
    out.push_back("grid.tau_max=" + num(tau_max));
    out.push_back("grid.tau_count=" + std::to_string(tau_count));
    out.push_back(std::string("grid.spacing=") +
                  (spacing == GridSpacing::log ? "log" : "linear"));
    out.push_back("grid.omega0_min=" + num(omega0_min));
    out.push_back("grid.omega0_max=" + num(omega0_max));
    out.push_back("grid.omega0_count=" + std::to_string(omega0_count));
    out.push_back("grid.t_end=" + num(t_end));
    out.push_back("grid.dt=" + num(dt));
    out.push_back("output.dir=" + out_dir);
    out.push_back("output.prefix=" + prefix);
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": not a number: '" + v + "'");
  }
}

inline int parse_int(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": not an integer: '" + v + "'");
  }
}

}  // namespace detail

inline RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("line " + std::to_string(line) + ": malformed section header");
      }
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section != "model" && section != "bath" && section != "protocol" &&
          section != "grid" && section != "output") {
        throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                        "' outside any section");
    }
    auto unknown = [&]() -> ConfigError {
      return ConfigError("line " + std::to_string(line) + ": unknown key '" +
                         key + "' in section [" + section + "]");
    };
    if (section == "model") {
      if (key == "kind") cfg.kind = value;
      else if (key == "omega0") cfg.omega0 = detail::parse_double(value, line);
      else if (key == "J") cfg.hopping = detail::parse_double(value, line);
      else if (key == "t_c") cfg.coupling = detail::parse_double(value, line);
      else if (key == "N_b") cfg.n_bath = detail::parse_int(value, line);
      else if (key == "statistics") {
        if (value == "fermion") cfg.statistics = Statistics::fermion;
        else if (value == "boson") cfg.statistics = Statistics::boson;
        else throw ConfigError("line " + std::to_string(line) +
                               ": statistics must be fermion or boson");
      } else throw unknown();
    } else if (section == "bath") {
      if (key == "occupation") cfg.occupation = value;
      else if (key == "beta") cfg.beta = detail::parse_double(value, line);
      else if (key == "mu") cfg.mu = detail::parse_double(value, line);
      else if (key == "sigma") cfg.sigma = detail::parse_double(value, line);
      else throw unknown();
    } else if (section == "protocol") {
      if (key == "type") {
        if (value == "ri") cfg.protocol = ProtocolType::ri;
        else if (value == "ec") cfg.protocol = ProtocolType::ec;
        else if (value == "custom") cfg.protocol = ProtocolType::custom;
        else throw ConfigError("line " + std::to_string(line) +
                               ": protocol type must be ri, ec or custom");
      } else if (key == "reset_pairs") {
        cfg.reset_pairs = value;
      } else throw unknown();
    } else if (section == "grid") {
      if (key == "tau_min") cfg.tau_min = detail::parse_double(value, line);
      else if (key == "tau_max") cfg.tau_max = detail::parse_double(value, line);
      else if (key == "tau_count") cfg.tau_count = detail::parse_int(value, line);
      else if (key == "spacing") {
        if (value == "linear") cfg.spacing = GridSpacing::linear;
        else if (value == "log") cfg.spacing = GridSpacing::log;
        else throw ConfigError("line " + std::to_string(line) +
                               ": spacing must be linear or log");
      } else if (key == "omega0_min") cfg.omega0_min = detail::parse_double(value, line);
      else if (key == "omega0_max") cfg.omega0_max = detail::parse_double(value, line);
      else if (key == "omega0_count") cfg.omega0_count = detail::parse_int(value, line);
      else if (key == "t_end") cfg.t_end = detail::parse_double(value, line);
      else if (key == "dt") cfg.dt = detail::parse_double(value, line);
      else throw unknown();
    } else {  // output
      if (key == "dir") cfg.out_dir = value;
      else if (key == "prefix") cfg.prefix = value;
      else throw unknown();
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  return parse_config(is);
}

// "alpha,beta,re,im; alpha,beta,re,im; ..." -> reset entries
inline std::vector<ResetSpec::ResetEntry> parse_reset_pairs(
    const std::string& text) {
  std::vector<ResetSpec::ResetEntry> out;
  std::istringstream groups(text);
  std::string group;
  int idx = 0;
  while (std::getline(groups, group, ';')) {
    ++idx;
    group = detail::trim(group);
    if (group.empty()) continue;
    std::istringstream fields(group);
    std::string f;
    std::vector<std::string> parts;
    while (std::getline(fields, f, ',')) parts.push_back(detail::trim(f));
    if (parts.size() != 4) {
      throw ConfigError("reset_pairs entry " + std::to_string(idx) +
                        " must be 'alpha,beta,re,im'");
    }
    ResetSpec::ResetEntry e;
    e.alpha = detail::parse_int(parts[0], idx);
    e.beta = detail::parse_int(parts[1], idx);
    e.value = Complex(detail::parse_double(parts[2], idx),
                      detail::parse_double(parts[3], idx));
    out.push_back(e);
  }
  if (out.empty()) throw ConfigError("reset_pairs is empty");
  return out;
}

}  // namespace resetmap
