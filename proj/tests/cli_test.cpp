#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hmpn/config.hpp"
#include "hmpn/io.hpp"

using namespace hmpn;

namespace {

const char* kMinimal =
    "model=hmpn\norder=2\nproblem=gaussian\nn_cells=100\nt_end=0.1\noutput=o.csv\n";

FieldState small_state() {
  FieldState s;
  s.model = ModelKind::hmpn;
  s.order = 2;
  s.grid = Grid(0.0, 1.0, 5);
  s.U.assign(5, {1.0, 0.2, 0.4});
  s.e.assign(5, 0.0);
  s.T.assign(5, 0.0);
  s.t = 0.25;
  return s;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(ParseConfig, MinimalDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.model, ModelKind::hmpn);
  EXPECT_EQ(c.order, 2);
  EXPECT_EQ(c.problem, "gaussian");
  EXPECT_EQ(c.n_cells, 100);
  EXPECT_EQ(c.cfl, 0.95);
  EXPECT_EQ(c.path_exponent, 1);
  EXPECT_EQ(c.simpson_intervals, 1);
  EXPECT_EQ(*c.t_end, 0.1);
  EXPECT_FALSE(c.a.has_value());
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const auto c = parse_config(
      "# run\n  model = pn # reference\norder=30\n\nproblem=two_beam\nn_cells=64\noutput=x.csv\n"
      "snapshot_times=0.5, 1\n");
  EXPECT_EQ(c.model, ModelKind::pn);
  EXPECT_EQ(c.order, 30);
  EXPECT_EQ(c.snapshot_times, (std::vector<double>{0.5, 1.0}));
}

TEST(ParseConfig, ValidationErrors) {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ValidationError& e) {
      return e.key();
    }
    return std::string("none");
  };
  EXPECT_EQ(key_of(std::string(kMinimal) + "cfl=1.5\n"), "cfl");
  EXPECT_EQ(key_of("model=hmpn\norder=0\nproblem=gaussian\nn_cells=100\noutput=o.csv\n"), "order");
  EXPECT_EQ(key_of("model=hmpn\norder=2\nproblem=gaussian\nn_cells=3\noutput=o.csv\n"), "n_cells");
  EXPECT_EQ(key_of("model=hmpn\norder=2\nproblem=nope\nn_cells=30\noutput=o.csv\n"), "problem");
  EXPECT_EQ(key_of("model=hmpn\norder=2\nn_cells=30\noutput=o.csv\n"), "problem");
}

TEST(ParseConfig, ParseErrorsCarryLineAndKey) {
  auto check = [](const std::string& text, int line, const std::string& key) {
    try {
      parse_config(text);
      ADD_FAILURE() << "no error for " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line);
      EXPECT_EQ(e.key(), key);
    }
  };
  check("model=hmpn\ncolour=blue\n", 2, "colour");
  check("model=hmpn\norder=two\n", 2, "order");
  check("model=hmpn\nmodel=pn\n", 2, "model");
  check("model=qn\n", 1, "model");
  check("# c\nn_cells 100\n", 2, "n_cells 100");
}

TEST(ParseConfig, RenderRoundTrip) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  const ModelKind models[] = {ModelKind::hmpn, ModelKind::mpn, ModelKind::pn};
  for (int trial = 0; trial < 200; ++trial) {
    SolverConfig c;
    c.model = models[trial % 3];
    c.order = 1 + trial % 12;
    c.problem = problem_names()[trial % problem_names().size()];
    c.n_cells = 4 + trial;
    c.cfl = u(rng);
    c.path_exponent = 1 + trial % 10;
    c.simpson_intervals = 1 + trial % 7;
    if (trial % 2) c.t_end = u(rng) * 10;
    if (trial % 3 == 0) c.steady_state = trial % 2 == 0;
    if (trial % 4 == 0) c.snapshot_times = {u(rng), u(rng) + 1.0};
    c.output = "out_" + std::to_string(trial) + ".csv";
    if (trial % 5 == 0) c.a = u(rng);
    if (trial % 7 == 0) c.c = u(rng) * 3;
    EXPECT_EQ(parse_config(render_config(c)), c) << render_config(c);
  }
}

TEST(Snapshot, FormatAndRoundTrip) {
  SolverConfig cfg = parse_config(kMinimal);
  const auto s = small_state();
  std::ostringstream os;
  write_snapshot(os, s, cfg);
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "# model=hmpn order=2 t=0.25 n_cells=5 cfl=0.94999999999999996 path_k=1");
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line, "z,E0,E1,E2,e,T");
  std::getline(lines, line);
  EXPECT_EQ(line, "0.10000000000000001,1,0.20000000000000001,0.40000000000000002,0,0");

  std::istringstream in(text);
  const auto snap = read_snapshot(in);
  ASSERT_EQ(snap.rows.size(), 5u);
  EXPECT_EQ(snap.meta.at("model"), "hmpn");
  for (std::size_t i = 0; i < snap.rows.size(); ++i) {
    // identical rows except z
    for (std::size_t j = 1; j < snap.columns.size(); ++j) EXPECT_EQ(snap.rows[i][j], snap.rows[0][j]);
    EXPECT_NO_THROW(moments_to_coeffs(MomentState(snap.moments(i))));
  }
}

TEST(Snapshot, DeterministicFiles) {
  SolverConfig cfg = parse_config(kMinimal);
  const auto p = problem_from(cfg);
  auto rs = settings_from(cfg);
  rs.n_cells = 40;
  const auto a = temp_path("hmpn_det_a.csv"), b = temp_path("hmpn_det_b.csv");
  write_snapshot(a, run(p, rs).snapshots.back(), cfg);
  write_snapshot(b, run(p, rs).snapshots.back(), cfg);
  std::ifstream fa(a), fb(b);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_GT(sa.str().size(), 100u);
}

TEST(Snapshot, WriteFailureIsIOError) {
  EXPECT_THROW(write_snapshot("/nonexistent-dir/x.csv", small_state(), parse_config(kMinimal)),
               IOError);
}

TEST(ErrorNorms, Examples) {
  const std::vector<double> z = {0.125, 0.375, 0.625, 0.875};
  const std::vector<double> ref(4, 1.0);
  auto n0 = error_norms(z, ref, z, ref);
  EXPECT_EQ(n0.L1, 0.0);
  EXPECT_EQ(n0.L2, 0.0);
  EXPECT_EQ(n0.Linf, 0.0);
  EXPECT_EQ(n0.relative_L2, 0.0);
  const double eps = 1e-3;
  const std::vector<double> u(4, 1.0 + eps);
  const auto n1 = error_norms(z, u, z, ref);
  EXPECT_NEAR(n1.relative_L2, eps, 1e-15);
  EXPECT_NEAR(n1.L1, eps, 1e-15);
  EXPECT_NEAR(n1.Linf, eps, 1e-15);
  EXPECT_THROW(error_norms(z, u, {0.1, 0.2, 0.3}, {1, 1, 1}), MeshMismatch);
  EXPECT_THROW(error_norms(z, u, {0.1, 0.375, 0.625, 0.875}, ref), MeshMismatch);
}
