#pragma once

// Snapshot CSV files and discrete error norms.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hmpn/config.hpp"
#include "hmpn/errors.hpp"
#include "hmpn/solver.hpp"

namespace hmpn {

/// Metadata comment, header `z,E0,...,EN,e,T`, one row per cell (monomial moments).
inline void write_snapshot(std::ostream& os, const FieldState& s, const SolverConfig& cfg) {
  using detail::fmt17;
  os << "# model=" << to_string(s.model) << " order=" << s.order << " t=" << fmt17(s.t)
     << " n_cells=" << s.n_cells() << " cfl=" << fmt17(cfg.cfl) << " path_k=" << cfg.path_exponent
     << "\n";
  os << "z";
  for (int k = 0; k <= s.order; ++k) os << ",E" << k;
  os << ",e,T\n";
  for (int i = 0; i < s.n_cells(); ++i) {
    os << fmt17(s.grid.center(i));
    for (double x : s.moments(i)) os << ',' << fmt17(x);
    os << ',' << fmt17(s.e[i]) << ',' << fmt17(s.T[i]) << '\n';
  }
}

inline void write_snapshot(const std::string& path, const FieldState& s, const SolverConfig& cfg) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IOError("cannot open '" + path + "' for writing");
  write_snapshot(f, s, cfg);
  f.flush();
  if (!f) throw IOError("write to '" + path + "' failed");
}

struct Snapshot {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == name) return static_cast<int>(j);
    throw IOError("missing column '" + name + "'");
  }
  std::vector<double> values(const std::string& name) const {
    const int j = column(name);
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[j]);
    return v;
  }
  /// Moments E_0..E_N of row i.
  std::vector<double> moments(std::size_t i) const {
    std::vector<double> E;
    for (int k = 0;; ++k) {
      const auto name = "E" + std::to_string(k);
      bool found = false;
      for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == name) {
          E.push_back(rows[i][j]);
          found = true;
        }
      if (!found) break;
    }
    return E;
  }
};

inline Snapshot read_snapshot(std::istream& in, const std::string& name = "<stream>") {
  Snapshot s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ws(line.substr(1));
      std::string tok;
      while (ws >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) s.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (s.columns.empty()) {
      s.columns = cells;
      continue;
    }
    if (cells.size() != s.columns.size())
      throw IOError(name + ":" + std::to_string(lineno) + ": wrong number of fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw IOError(name + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
      }
    }
    s.rows.push_back(std::move(row));
  }
  if (s.columns.empty()) throw IOError(name + ": no header");
  return s;
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open '" + path + "'");
  return read_snapshot(f, path);
}

struct ErrorNorms {
  double L1 = 0.0;
  double L2 = 0.0;
  double Linf = 0.0;
  double relative_L2 = 0.0;
};

/// Cell-width weighted norms of u - ref; both on the same mesh.
inline ErrorNorms error_norms(const std::vector<double>& z, const std::vector<double>& u,
                              const std::vector<double>& zref, const std::vector<double>& ref) {
  if (z.size() != zref.size() || u.size() != z.size() || ref.size() != zref.size())
    throw MeshMismatch("meshes have different sizes");
  const std::size_t n = z.size();
  if (n == 0) throw MeshMismatch("empty mesh");
  const double width = n > 1 ? std::abs(z.back() - z.front()) : 1.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(z[i] - zref[i]) > 1e-9 * std::max(width, 1.0))
      throw MeshMismatch("cell centres differ at row " + std::to_string(i));
  const double dz = n > 1 ? width / (n - 1) : 1.0;
  ErrorNorms r;
  double l2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(u[i] - ref[i]);
    r.L1 += d * dz;
    l2 += d * d * dz;
    ref2 += ref[i] * ref[i] * dz;
    r.Linf = std::max(r.Linf, d);
  }
  r.L2 = std::sqrt(l2);
  r.relative_L2 = ref2 > 0.0 ? r.L2 / std::sqrt(ref2) : (r.L2 == 0.0 ? 0.0 : INFINITY);
  return r;
}

/// Norms of E0 between two snapshot files.
inline ErrorNorms error_norms(const Snapshot& run, const Snapshot& ref) {
  return error_norms(run.values("z"), run.values("E0"), ref.values("z"), ref.values("E0"));
}

inline ErrorNorms error_norms(const FieldState& run, const FieldState& ref) {
  std::vector<double> z, u, zr, r;
  for (int i = 0; i < run.n_cells(); ++i) {
    z.push_back(run.grid.center(i));
    u.push_back(run.U[i][0]);
  }
  for (int i = 0; i < ref.n_cells(); ++i) {
    zr.push_back(ref.grid.center(i));
    r.push_back(ref.U[i][0]);
  }
  return error_norms(z, u, zr, r);
}

}  // namespace hmpn
