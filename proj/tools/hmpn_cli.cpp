// Command-line driver: solve, scan, speeds, compare.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hmpn/hmpn.hpp"

namespace {

using namespace hmpn;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// out.csv -> out_t0.5.csv
std::string snapshot_path(const std::string& output, double t) {
  std::filesystem::path p(output);
  char buf[64];
  std::snprintf(buf, sizeof buf, "_t%.6g", t);
  return (p.parent_path() / (p.stem().string() + buf + p.extension().string())).string();
}

int cmd_solve(const std::string& config_path) {
  const SolverConfig cfg = parse_config(read_file(config_path));
  const Problem problem = problem_from(cfg);
  const RunResult res = run(problem, settings_from(cfg));
  const auto& final_state = res.snapshots.back();
  for (std::size_t i = 0; i + 1 < res.snapshots.size(); ++i)
    write_snapshot(snapshot_path(cfg.output, res.snapshots[i].t), res.snapshots[i], cfg);
  write_snapshot(cfg.output, final_state, cfg);
  std::printf("%s %s N=%d cells=%d t=%.10g steps=%ld%s -> %s\n", problem.name.c_str(),
              to_string(cfg.model).c_str(), cfg.order, cfg.n_cells, final_state.t, res.steps,
              problem.steady_state ? (res.steady_reached ? " steady" : " NOT steady") : "",
              cfg.output.c_str());
  if (problem.steady_state && !res.steady_reached) {
    std::fprintf(stderr, "steady state not reached by t=%g\n", final_state.t);
    return 1;
  }
  return 0;
}

int cmd_scan(const std::string& model, double e3, int grid, const std::string& output) {
  int N;
  if (model == "mp2")
    N = 2;
  else if (model == "mp3")
    N = 3;
  else
    throw ValidationError("scan model must be mp2 or mp3", "model");
  if (grid < 1) throw ValidationError("grid must be >= 1", "grid");
  ScanGrid g;
  g.resolution = grid;
  const auto points = scan_real_region(N, e3, g);
  if (output.empty()) {
    write_scan_csv(std::cout, N, e3, points);
  } else {
    std::ofstream f(output);
    if (!f) throw IOError("cannot open '" + output + "' for writing");
    write_scan_csv(f, N, e3, points);
  }
  return 0;
}

/// One row per alpha (cell-centred grid on (-1, 1)): alpha, lambda_0..lambda_N.
int cmd_speeds(int order, int n) {
  if (order < 1 || order > kMaxOrder) throw ValidationError("order out of range", "order");
  if (n < 1) throw ValidationError("alpha-grid must be >= 1", "alpha-grid");
  std::printf("# speeds N=%d\nalpha", order);
  for (int k = 0; k <= order; ++k) std::printf(",lambda_%d", k);
  std::printf("\n");
  for (int j = 0; j < n; ++j) {
    const double alpha = -1.0 + (2.0 * j + 1.0) / n;
    std::printf("%.17g", alpha);
    for (double l : characteristic_speeds(alpha, order)) std::printf(",%.17g", l);
    std::printf("\n");
  }
  return 0;
}

int cmd_compare(const std::string& run_csv, const std::string& ref_csv) {
  const auto r = error_norms(read_snapshot(run_csv), read_snapshot(ref_csv));
  std::printf("L1,L2,Linf,relative_L2\n%.17g,%.17g,%.17g,%.17g\n", r.L1, r.L2, r.Linf,
              r.relative_L2);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-closure solvers for grey radiative transfer in slab geometry"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "run a simulation described by a config file");
  solve->add_option("config", config_path, "key=value config file")->required();

  std::string scan_model, scan_output;
  double e3 = 0.0;
  int grid = 200;
  auto* scan = app.add_subcommand("scan", "classify the (E1/E0, E2/E0) plane of MP2/MP3");
  scan->add_option("--model", scan_model, "mp2 or mp3")->required();
  scan->add_option("--e3", e3, "fixed E3/E0");
  scan->add_option("--grid", grid, "points per axis");
  scan->add_option("--output", scan_output, "CSV path (default: stdout)");

  int order = 1, alpha_grid = 100;
  auto* speeds = app.add_subcommand("speeds", "HMPN characteristic speeds over alpha");
  speeds->add_option("--order", order, "moment order N")->required();
  speeds->add_option("--alpha-grid", alpha_grid, "number of alpha values");

  std::string run_csv, ref_csv;
  auto* compare = app.add_subcommand("compare", "error norms of E0 between two snapshots");
  compare->add_option("run", run_csv)->required();
  compare->add_option("ref", ref_csv)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve) return cmd_solve(config_path);
    if (*scan) return cmd_scan(scan_model, e3, grid, scan_output);
    if (*speeds) return cmd_speeds(order, alpha_grid);
    if (*compare) return cmd_compare(run_csv, ref_csv);
  } catch (const BlowUpDetected& e) {
    std::fprintf(stderr, "blow-up detected at t=%.10g in cell %d: %s\n", e.time(), e.cell(),
                 e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error (line %d, key '%s'): %s\n", e.line(), e.key().c_str(),
                 e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
