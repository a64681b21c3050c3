#pragma once

// Line-oriented run configuration: `key = value`, `#` comments.
//
// Keys
//   scenario                     modes | energy_sweep | exponent | pfa_compare | convergence
//                                | verify | fig1 | fig2 | fig3 | fig4
//   output                       output path (stdout when absent for single-file scenarios)
//   geometry.family              sphere | prolate | oblate
//   geometry.r_major             semi-axis r_> (defaults to r_minor for a sphere)
//   geometry.r_minor             semi-axis r_<
//   substrate.epsilon            positive number, or inf for a perfect conductor
//   substrate.perfect_conductor  true | false
//   ambient.epsilon              positive number (default 1)
//   sweep.z_over_rmin            start:stop:points[:log], start:stop:points(log), or a comma list
//   sweep.aspects                comma list of r_major/r_minor (default: geometry value)
//   sweep.substrates             comma list of substrate permittivities, inf allowed
//   truncation.mode              ladder | fixed (default ladder)
//   truncation.l_max             truncation for fixed mode and the modes scenario (default 10)
//   truncation.l_step            ladder increment (default 5)
//   truncation.l_cap             ladder cap (default 100)
//   truncation.tolerance         relative convergence tolerance on Ξ (default 1e-3)
//   particle.hbar_omega_p        ħω_p in eV; adds a physical energy column when set
//
// A CSV written by the tool can itself be used as a configuration: its
// `# key = value` echo lines are read and everything else is ignored.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "casimir/error.hpp"
#include "casimir/model.hpp"

namespace casimir::cli {

inline constexpr const char* kToolName = "casimir-spectral";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Scenario { modes, energy_sweep, exponent, pfa_compare, convergence, verify, fig1, fig2, fig3, fig4 };

inline constexpr std::pair<Scenario, const char*> kScenarioNames[] = {
    {Scenario::modes, "modes"},           {Scenario::energy_sweep, "energy_sweep"}, {Scenario::exponent, "exponent"},
    {Scenario::pfa_compare, "pfa_compare"}, {Scenario::convergence, "convergence"},   {Scenario::verify, "verify"},
    {Scenario::fig1, "fig1"},             {Scenario::fig2, "fig2"},                 {Scenario::fig3, "fig3"},
    {Scenario::fig4, "fig4"}};

inline const char* to_string(Scenario s) {
  for (const auto& [k, name] : kScenarioNames)
    if (k == s) return name;
  return "?";
}

inline std::optional<Scenario> parse_scenario(std::string_view text) {
  for (const auto& [k, name] : kScenarioNames)
    if (text == name) return k;
  return std::nullopt;
}

enum class TruncationMode { ladder, fixed };

struct Grid {
  std::vector<double> values;
  /// Normalized textual form, echoed into outputs.
  std::string text;
};

struct RunConfig {
  std::optional<Scenario> scenario;
  std::optional<std::string> output;

  std::optional<Family> family;
  std::optional<double> r_major;
  std::optional<double> r_minor;
  std::optional<double> substrate_epsilon;  // +inf for a perfect conductor
  double ambient_epsilon = 1.0;

  std::optional<Grid> z_over_rmin;
  std::optional<std::vector<double>> aspects;
  std::optional<std::vector<double>> substrates;

  TruncationMode mode = TruncationMode::ladder;
  int l_max = 10;
  int l_step = 5;
  int l_cap = 100;
  double tolerance = 1e-3;
  std::optional<double> hbar_omega_p;

  /// Line on which each key was set, for diagnostics.
  std::map<std::string, int> key_lines;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(std::string_view(s).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class LineParser {
 public:
  LineParser(int line, std::string key) : line_(line), key_(std::move(key)) {}

  [[noreturn]] void fail(const std::string& what) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "line %d: ", line_);
    throw ParseError(buf + what + " (key '" + key_ + "')", line_, key_);
  }

  double number(const std::string& text, bool allow_inf = false) const {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "inf" || t == "infinity" || t == "+inf") {
      if (!allow_inf) fail("infinite value not allowed");
      return std::numeric_limits<double>::infinity();
    }
    if (t.empty()) fail("expected a number");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) fail("expected a number, got '" + text + "'");
    return v;
  }

  double positive(const std::string& text, bool allow_inf = false) const {
    const double v = number(text, allow_inf);
    if (!(v > 0.0)) fail("value must be positive");
    return v;
  }

  int integer(const std::string& text, int min_value) const {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) fail("expected an integer, got '" + text + "'");
    if (v < min_value || v > 100000) fail("integer out of range");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& text) const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail("expected true or false, got '" + text + "'");
  }

  std::vector<double> positive_list(const std::string& text, bool allow_inf) const {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(positive(item, allow_inf));
    if (out.empty()) fail("empty list");
    return out;
  }

  Grid grid(const std::string& text) const {
    Grid g;
    if (text.find(':') == std::string::npos) {
      g.values = positive_list(text, false);
      for (std::size_t i = 0; i < g.values.size(); ++i) g.text += (i ? "," : "") + format_number(g.values[i]);
    } else {
      std::string body = text;
      bool log = false;
      if (body.size() > 5 && body.compare(body.size() - 5, 5, "(log)") == 0) {
        log = true;
        body = trim(std::string_view(body).substr(0, body.size() - 5));
      }
      auto parts = split(body, ':');
      if (parts.size() == 4) {
        if (parts[3] == "log") log = true;
        else if (parts[3] != "lin") fail("grid spacing must be log or lin");
        parts.pop_back();
      }
      if (parts.size() != 3) fail("grid must be start:stop:points[:log]");
      const double a = positive(parts[0]), b = positive(parts[1]);
      const int n = integer(parts[2], 1);
      if (n > 1 && !(b > a)) fail("grid stop must exceed start");
      for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        double v = log ? a * std::pow(b / a, t) : a + (b - a) * t;
        if (i == n - 1) v = n == 1 ? a : b;
        g.values.push_back(v);
      }
      g.text = format_number(a) + ":" + format_number(b) + ":" + std::to_string(n) + (log ? ":log" : "");
    }
    for (std::size_t i = 1; i < g.values.size(); ++i)
      if (!(g.values[i] > g.values[i - 1])) fail("grid values must be strictly increasing");
    return g;
  }

 private:
  int line_;
  std::string key_;
};

inline bool is_echo_document(std::string_view text) {
  const std::string header = std::string("# ") + kToolName;
  return text.substr(0, header.size()) == header;
}

}  // namespace detail

/// Parses a configuration document; a CSV produced by the tool is accepted too.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  const bool echo = detail::is_echo_document(text);
  std::optional<bool> perfect_conductor;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string raw(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (echo) {
      if (raw.rfind("# ", 0) != 0 || raw.find(" = ") == std::string::npos || raw.find(':') < raw.find(" = ")) continue;
      raw = raw.substr(2);
    } else {
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
    }
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) detail::LineParser(line_no, line).fail("expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    const detail::LineParser p(line_no, key);
    if (cfg.key_lines.count(key)) p.fail("duplicate key");
    cfg.key_lines[key] = line_no;
    if (value.empty()) p.fail("missing value");

    if (key == "scenario") {
      cfg.scenario = parse_scenario(value);
      if (!cfg.scenario) p.fail("unknown scenario '" + value + "'");
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "geometry.family") {
      if (value == "sphere") cfg.family = Family::sphere;
      else if (value == "prolate") cfg.family = Family::prolate;
      else if (value == "oblate") cfg.family = Family::oblate;
      else p.fail("family must be sphere, prolate or oblate");
    } else if (key == "geometry.r_major") {
      cfg.r_major = p.positive(value);
    } else if (key == "geometry.r_minor") {
      cfg.r_minor = p.positive(value);
    } else if (key == "substrate.epsilon") {
      cfg.substrate_epsilon = p.positive(value, true);
    } else if (key == "substrate.perfect_conductor") {
      perfect_conductor = p.boolean(value);
    } else if (key == "ambient.epsilon") {
      cfg.ambient_epsilon = p.positive(value);
    } else if (key == "sweep.z_over_rmin") {
      cfg.z_over_rmin = p.grid(value);
    } else if (key == "sweep.aspects") {
      cfg.aspects = p.positive_list(value, false);
      for (double a : *cfg.aspects)
        if (a < 1.0) p.fail("aspect ratios r_major/r_minor must be at least 1");
    } else if (key == "sweep.substrates") {
      cfg.substrates = p.positive_list(value, true);
    } else if (key == "truncation.mode") {
      if (value == "ladder") cfg.mode = TruncationMode::ladder;
      else if (value == "fixed") cfg.mode = TruncationMode::fixed;
      else p.fail("truncation mode must be ladder or fixed");
    } else if (key == "truncation.l_max") {
      cfg.l_max = p.integer(value, 1);
    } else if (key == "truncation.l_step") {
      cfg.l_step = p.integer(value, 1);
    } else if (key == "truncation.l_cap") {
      cfg.l_cap = p.integer(value, 1);
    } else if (key == "truncation.tolerance") {
      cfg.tolerance = p.positive(value);
    } else if (key == "particle.hbar_omega_p") {
      cfg.hbar_omega_p = p.positive(value);
    } else {
      p.fail("unknown key");
    }
  }

  auto line_of = [&](const char* key) { return cfg.key_lines.count(key) ? cfg.key_lines.at(key) : 0; };
  if (perfect_conductor.has_value()) {
    const detail::LineParser p(line_of("substrate.perfect_conductor"), "substrate.perfect_conductor");
    if (*perfect_conductor) {
      if (cfg.substrate_epsilon && std::isfinite(*cfg.substrate_epsilon)) p.fail("conflicts with a finite substrate.epsilon");
      cfg.substrate_epsilon = std::numeric_limits<double>::infinity();
    } else if (!cfg.substrate_epsilon || std::isinf(*cfg.substrate_epsilon)) {
      p.fail("perfect_conductor = false requires a finite substrate.epsilon");
    }
  }
  if (cfg.family == Family::sphere) {
    const detail::LineParser p(line_of("geometry.r_major"), "geometry.r_major");
    if (!cfg.r_minor && cfg.r_major) cfg.r_minor = cfg.r_major;
    if (cfg.r_major && cfg.r_minor && *cfg.r_major != *cfg.r_minor) p.fail("a sphere needs r_major == r_minor");
    if (cfg.r_minor) cfg.r_major = cfg.r_minor;
  } else if (cfg.family && cfg.r_major && cfg.r_minor && !(*cfg.r_major > *cfg.r_minor)) {
    detail::LineParser(line_of("geometry.r_major"), "geometry.r_major").fail("spheroid needs r_major > r_minor");
  }
  if (cfg.l_cap < cfg.l_step) detail::LineParser(line_of("truncation.l_cap"), "truncation.l_cap").fail("l_cap must be at least l_step");
  return cfg;
}

/// Medium for a permittivity value where +inf stands for a perfect conductor.
inline Medium substrate_from_epsilon(double eps) {
  if (std::isinf(eps)) return PerfectConductor{};
  return ConstantMedium{eps};
}

/// Full effective configuration as ordered `key = value` pairs (output excluded).
inline std::vector<std::pair<std::string, std::string>> echo_entries(const RunConfig& c) {
  using detail::format_number;
  std::vector<std::pair<std::string, std::string>> out;
  if (c.scenario) out.emplace_back("scenario", to_string(*c.scenario));
  if (c.family) out.emplace_back("geometry.family", casimir::to_string(*c.family));
  if (c.r_major) out.emplace_back("geometry.r_major", format_number(*c.r_major));
  if (c.r_minor) out.emplace_back("geometry.r_minor", format_number(*c.r_minor));
  out.emplace_back("substrate.epsilon", format_number(c.substrate_epsilon.value_or(std::numeric_limits<double>::infinity())));
  out.emplace_back("ambient.epsilon", format_number(c.ambient_epsilon));
  if (c.z_over_rmin) out.emplace_back("sweep.z_over_rmin", c.z_over_rmin->text);
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
    return s;
  };
  if (c.aspects) out.emplace_back("sweep.aspects", list(*c.aspects));
  if (c.substrates) out.emplace_back("sweep.substrates", list(*c.substrates));
  out.emplace_back("truncation.mode", c.mode == TruncationMode::ladder ? "ladder" : "fixed");
  out.emplace_back("truncation.l_max", std::to_string(c.l_max));
  out.emplace_back("truncation.l_step", std::to_string(c.l_step));
  out.emplace_back("truncation.l_cap", std::to_string(c.l_cap));
  out.emplace_back("truncation.tolerance", format_number(c.tolerance));
  if (c.hbar_omega_p) out.emplace_back("particle.hbar_omega_p", format_number(*c.hbar_omega_p));
  return out;
}

}  // namespace casimir::cli
