#pragma once

// Flat key=value run configuration with '#' comments.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hmpn/analysis.hpp"
#include "hmpn/errors.hpp"
#include "hmpn/problems.hpp"

namespace hmpn {

struct SolverConfig {
  ModelKind model = ModelKind::hmpn;
  int order = 1;
  std::string problem;
  int n_cells = 0;
  double cfl = 0.95;
  int path_exponent = 1;
  int simpson_intervals = 1;
  std::optional<double> t_end;         ///< unset: problem default
  std::optional<bool> steady_state;    ///< unset: problem default
  std::vector<double> snapshot_times;  ///< extra output times before t_end
  std::string output;
  std::optional<double> a;
  std::optional<double> c;

  bool operator==(const SolverConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || v.empty())
    throw ParseError("expected a number for '" + key + "'", line, key);
  return x;
}

inline int parse_int(const std::string& v, int line, const std::string& key) {
  int x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end || v.empty())
    throw ParseError("expected an integer for '" + key + "'", line, key);
  return x;
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("expected true/false for '" + key + "'", line, key);
}

inline ModelKind parse_model(const std::string& v, int line) {
  if (v == "hmpn") return ModelKind::hmpn;
  if (v == "mpn") return ModelKind::mpn;
  if (v == "pn") return ModelKind::pn;
  throw ParseError("model must be hmpn, mpn or pn", line, "model");
}

}  // namespace detail

inline void validate(const SolverConfig& c) {
  if (c.order < 1) throw ValidationError("order must be >= 1", "order");
  if (c.model != ModelKind::pn && c.order > kMaxOrder)
    throw ValidationError("order must be <= " + std::to_string(kMaxOrder), "order");
  const auto& names = problem_names();
  if (std::find(names.begin(), names.end(), c.problem) == names.end())
    throw ValidationError("unknown problem '" + c.problem + "'", "problem");
  if (c.n_cells < 4) throw ValidationError("n_cells must be >= 4", "n_cells");
  if (!(c.cfl > 0.0 && c.cfl < 1.0)) throw ValidationError("cfl must lie in (0,1)", "cfl");
  if (c.path_exponent < 1) throw ValidationError("path_exponent must be >= 1", "path_exponent");
  if (c.simpson_intervals < 1)
    throw ValidationError("simpson_intervals must be >= 1", "simpson_intervals");
  if (c.t_end && !(*c.t_end > 0.0)) throw ValidationError("t_end must be positive", "t_end");
  for (double t : c.snapshot_times)
    if (!(t > 0.0)) throw ValidationError("snapshot times must be positive", "snapshot_times");
  if (c.output.empty()) throw ValidationError("output path is required", "output");
  if (c.a && !(*c.a > 0.0)) throw ValidationError("a must be positive", "a");
  if (c.c && !(*c.c > 0.0)) throw ValidationError("c must be positive", "c");
}

inline SolverConfig parse_config(const std::string& text) {
  SolverConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const auto hash = raw.find('#');
    const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line, s);
    const std::string key = detail::trim(s.substr(0, eq)), val = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line, key);
    if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", line, key);
    seen[key] = line;

    if (key == "model") {
      cfg.model = detail::parse_model(val, line);
    } else if (key == "order") {
      cfg.order = detail::parse_int(val, line, key);
    } else if (key == "problem") {
      cfg.problem = val;
    } else if (key == "n_cells") {
      cfg.n_cells = detail::parse_int(val, line, key);
    } else if (key == "cfl") {
      cfg.cfl = detail::parse_double(val, line, key);
    } else if (key == "path_exponent") {
      cfg.path_exponent = detail::parse_int(val, line, key);
    } else if (key == "simpson_intervals") {
      cfg.simpson_intervals = detail::parse_int(val, line, key);
    } else if (key == "t_end") {
      cfg.t_end = detail::parse_double(val, line, key);
    } else if (key == "steady_state") {
      cfg.steady_state = detail::parse_bool(val, line, key);
    } else if (key == "snapshot_times") {
      std::istringstream items(val);
      std::string item;
      while (std::getline(items, item, ','))
        cfg.snapshot_times.push_back(detail::parse_double(detail::trim(item), line, key));
    } else if (key == "output") {
      cfg.output = val;
    } else if (key == "a") {
      cfg.a = detail::parse_double(val, line, key);
    } else if (key == "c") {
      cfg.c = detail::parse_double(val, line, key);
    } else {
      throw ParseError("unknown key '" + key + "'", line, key);
    }
  }
  for (const char* required : {"model", "order", "problem", "n_cells"})
    if (!seen.count(required))
      throw ValidationError(std::string("missing key '") + required + "'", required);
  validate(cfg);
  return cfg;
}

inline std::string render_config(const SolverConfig& c) {
  std::ostringstream os;
  os << "model=" << to_string(c.model) << "\n"
     << "order=" << c.order << "\n"
     << "problem=" << c.problem << "\n"
     << "n_cells=" << c.n_cells << "\n"
     << "cfl=" << detail::fmt17(c.cfl) << "\n"
     << "path_exponent=" << c.path_exponent << "\n"
     << "simpson_intervals=" << c.simpson_intervals << "\n";
  if (c.t_end) os << "t_end=" << detail::fmt17(*c.t_end) << "\n";
  if (c.steady_state) os << "steady_state=" << (*c.steady_state ? "true" : "false") << "\n";
  if (!c.snapshot_times.empty()) {
    os << "snapshot_times=";
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
      os << (i ? "," : "") << detail::fmt17(c.snapshot_times[i]);
    os << "\n";
  }
  os << "output=" << c.output << "\n";
  if (c.a) os << "a=" << detail::fmt17(*c.a) << "\n";
  if (c.c) os << "c=" << detail::fmt17(*c.c) << "\n";
  return os.str();
}

/// Problem and run settings described by a config.
inline Problem problem_from(const SolverConfig& c) {
  ProblemOverrides ov;
  ov.t_end = c.t_end;
  ov.a = c.a;
  ov.c = c.c;
  Problem p = make_problem(c.problem, ov);
  if (c.steady_state) p.steady_state = *c.steady_state;
  if (!p.steady_state && !(p.t_end > 0.0))
    throw ValidationError("problem '" + c.problem + "' needs t_end or steady_state", "t_end");
  return p;
}

inline RunSettings settings_from(const SolverConfig& c) {
  RunSettings rs;
  rs.model = c.model;
  rs.order = c.order;
  rs.n_cells = c.n_cells;
  rs.cfl = c.cfl;
  rs.path = {c.path_exponent, c.simpson_intervals};
  rs.snapshot_times = c.snapshot_times;
  return rs;
}

}  // namespace hmpn
