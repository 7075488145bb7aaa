// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hmpn/hmpn.hpp"

using namespace hmpn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }

std::vector<double> e0_profile(const FieldState& s) {
  std::vector<double> v;
  for (int i = 0; i < s.n_cells(); ++i) v.push_back(s.U[i][0]);
  return v;
}

double rel_l2(const std::vector<double>& u, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num += (u[i] - ref[i]) * (u[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return std::sqrt(num / den);
}

RunResult solve(const Problem& p, ModelKind model, int N, int cells, PathSpec path = {},
                std::vector<double> snapshots = {}) {
  RunSettings rs;
  rs.model = model;
  rs.order = N;
  rs.n_cells = cells;
  rs.path = path;
  rs.snapshot_times = std::move(snapshots);
  return run(p, rs);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + sci(v[i]);
  return s;
}

// 1. HMPN hyperbolicity at random states.
Outcome criterion1() {
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> a(-0.99, 0.99), f0(0.1, 2.0), u(-1.0, 1.0);
  const double tol = 1e-8;
  int checked = 0;
  double worst_gap = INFINITY, worst_speed = 0.0;
  for (int N = 1; N <= 10; ++N) {
    for (int trial = 0; trial < 500; ++trial) {
      SpectralCoeffs w;
      w.alpha = a(rng);
      w.f.assign(N + 1, 0.0);
      w.f[0] = f0(rng);
      for (int k = 2; k <= N; ++k) w.f[k] = u(rng) * w.f[0];
      const auto sys = assemble_hmpn(w);
      const auto v = classify(sys);
      if (!v.is_real_diagonalizable)
        return {false, "non-real or defective spectrum at N=" + std::to_string(N)};
      for (std::size_t k = 0; k < v.eigenvalues.size(); ++k) {
        const auto z = v.eigenvalues[k];
        if (std::abs(z.imag()) > tol) return {false, "complex eigenvalue at N=" + std::to_string(N)};
        if (!(std::abs(z.real()) < 1.0)) return {false, "speed outside (-1,1)"};
        worst_speed = std::max(worst_speed, std::abs(z.real()));
        if (k > 0) {
          const double gap = z.real() - v.eigenvalues[k - 1].real();
          worst_gap = std::min(worst_gap, gap);
          if (!(gap > tol)) return {false, "repeated eigenvalue at N=" + std::to_string(N)};
        }
      }
      const Eigen::MatrixXd L = sys.Lambda.asDiagonal();
      const Eigen::MatrixXd A0 = sys.D.transpose() * L * sys.D;
      const Eigen::MatrixXd A1 = sys.D.transpose() * L * sys.M * sys.D;
      if ((A0 - A0.transpose()).norm() > tol * A0.norm() ||
          (A1 - A1.transpose()).norm() > tol * A1.norm())
        return {false, "symmetrizer not symmetric at N=" + std::to_string(N)};
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A0 + A0.transpose()));
      if (!(es.eigenvalues().minCoeff() > 0.0)) return {false, "symmetrizer not SPD"};
      ++checked;
    }
  }
  return {true, std::to_string(checked) + " states; max|lambda|=" + fmt("%.12f", worst_speed) +
                    " min gap=" + sci(worst_gap)};
}

// 2. MP3 non-real regions and MP2 superluminal speeds.
Outcome criterion2() {
  ScanGrid g;
  g.resolution = 200;
  std::string detail;
  bool ok = true;
  for (double e3 : {0.0, 0.2, 0.5}) {
    const auto pts = scan_real_region(3, e3, g);
    int nonreal = 0, real = 0;
    const ScanPoint* eq = nullptr;
    double best = INFINITY;
    for (const auto& p : pts) {
      nonreal += p.status == ScanStatus::nonreal;
      real += p.status == ScanStatus::real;
      const double d = std::hypot(p.e1_ratio, p.e2_ratio - 1.0 / 3.0);
      if (d < best) {
        best = d;
        eq = &p;
      }
    }
    // (0, 1/3, e3) is a third-order moment vector only for |e3| <= 2/9; outside that the
    // isotropic state does not lie on the slice and only a nonempty real set is required
    const bool on_slice = std::abs(e3) <= 2.0 / 9.0;
    const bool eq_real = eq && eq->status == ScanStatus::real;
    ok = ok && nonreal > 0 && real > 0 && (!on_slice || eq_real);
    detail += "e3=" + fmt("%g", e3) + ": nonreal=" + std::to_string(nonreal) +
              " real=" + std::to_string(real) +
              (on_slice ? (eq_real ? " eq real; " : " eq NOT real; ") : " eq off slice; ");
  }
  const auto mp2 = scan_real_region(2, 0.0, g);
  int fast = 0;
  double vmax = 0.0;
  for (const auto& p : mp2)
    if (p.status == ScanStatus::real && p.max_abs_speed > 1.0) {
      ++fast;
      vmax = std::max(vmax, p.max_abs_speed);
    }
  ok = ok && fast > 0;
  detail += "MP2 |lambda|>1 at " + std::to_string(fast) + " points (max " + fmt("%.4f", vmax) + ")";
  return {ok, detail};
}

// 3. Monotone speeds in alpha and interlacing in N.
Outcome criterion3() {
  const int n = 50;
  const double margin = 1e-10;
  double min_dec = INFINITY, min_inter = INFINITY;
  for (int N = 1; N <= 10; ++N) {
    std::vector<std::vector<double>> S;
    for (int j = 0; j < n; ++j) S.push_back(characteristic_speeds(-1.0 + (2.0 * j + 1.0) / n, N));
    for (int j = 1; j < n; ++j)
      for (int k = 0; k <= N; ++k) {
        const double d = S[j - 1][k] - S[j][k];
        min_dec = std::min(min_dec, d);
        if (!(d > margin))
          return {false, "lambda_" + std::to_string(k) + " not decreasing at N=" + std::to_string(N)};
      }
    if (N < 2) continue;
    for (int j = 0; j < n; ++j) {
      const auto lo = characteristic_speeds(-1.0 + (2.0 * j + 1.0) / n, N - 1);
      for (int k = 0; k < N; ++k) {
        const double d = std::min(lo[k] - S[j][k], S[j][k + 1] - lo[k]);
        min_inter = std::min(min_inter, d);
        if (!(d > margin)) return {false, "interlacing fails at N=" + std::to_string(N)};
      }
    }
  }
  return {true, "min decrease=" + sci(min_dec) + " min interlacing margin=" + sci(min_inter)};
}

// 4. HMP1 and MP1 trajectories coincide.
Outcome criterion4() {
  const auto p = make_problem("riemann", ProblemOverrides::end_time(0.05));
  const auto h = solve(p, ModelKind::hmpn, 1, 200).snapshots.back();
  const auto m = solve(p, ModelKind::mpn, 1, 200).snapshots.back();
  if (h.t != m.t) return {false, "different end times"};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i)
    for (int k = 0; k <= 1; ++k)
      worst = std::max(worst, std::abs(h.U[i][k] - m.U[i][k]) / std::abs(h.U[i][0]));
  return {worst <= 1e-12, "max relative difference " + sci(worst)};
}

// 5. Source step conserves e + E0/c.
Outcome criterion5() {
  Material m = make_problem("su_olson").material;
  m.source = [](double) { return 0.0; };
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 10000; ++draw) {
    const int N = 1 + draw % 8;
    const double E0 = std::pow(10.0, -8 + 10 * u(rng));
    const double T = std::pow(10.0, -3 + 3.5 * u(rng));
    const double dt = std::pow(10.0, -5 + 7 * u(rng));
    // realizable moments: isotropic part plus a point mass
    const double mu0 = 2 * u(rng) - 1, share = u(rng);
    std::vector<double> U(N + 1);
    for (int k = 0; k <= N; ++k)
      U[k] = E0 * ((1 - share) * (k % 2 == 0 ? 1.0 / (k + 1) : 0.0) + share * std::pow(mu0, k));
    const double e = m.energy.e(T);
    const auto r = implicit_source_cell(U, e, T, dt, m, 30 * u(rng), Variables::monomial, draw);
    const double before = e + U[0] / m.c, after = r.e + r.U[0] / m.c;
    worst = std::max(worst, std::abs(after - before) / before);
  }
  return {worst <= 1e-12, "10000 draws, max relative drift " + sci(worst)};
}

// 6. Free-streaming Riemann problem: errors fall with N and beat PN.
Outcome criterion6() {
  const auto p = make_problem("riemann");
  std::vector<double> hm, pn;
  for (int N : {2, 4, 6, 8}) {
    const auto s = solve(p, ModelKind::hmpn, N, 1000).snapshots.back();
    const auto q = solve(p, ModelKind::pn, N, 1000).snapshots.back();
    std::vector<double> ex;
    for (int i = 0; i < 1000; ++i) ex.push_back(riemann_free_stream_exact(s.grid.center(i), s.t, 0));
    hm.push_back(rel_l2(e0_profile(s), ex));
    pn.push_back(rel_l2(e0_profile(q), ex));
  }
  const bool beats = hm[1] < pn[1] && hm[2] < pn[2] && hm[3] < pn[3];
  return {strictly_decreasing(hm) && beats, "HMPN N=2,4,6,8: " + join(hm) + "; PN: " + join(pn)};
}

// 7. MPN blows up on the Riemann data, HMPN does not.
Outcome criterion7() {
  // the instability grows on the grid scale, so blow-up time scales with dz; 4000 cells put
  // MP8 within the horizon before the fan leaves the domain
  const int cells = 4000;
  const auto p_mpn = make_problem("riemann", ProblemOverrides::end_time(0.5));
  const auto p_hmpn = make_problem("riemann");
  std::string detail;
  bool ok = true;
  for (int N : {4, 6, 8}) {
    try {
      solve(p_mpn, ModelKind::mpn, N, cells);
      ok = false;
      detail += "MP" + std::to_string(N) + " finished without blow-up; ";
    } catch (const BlowUpDetected& e) {
      detail += "MP" + std::to_string(N) + " blow-up t=" + fmt("%.4f", e.time()) + "; ";
    }
    const auto s = solve(p_hmpn, ModelKind::hmpn, N, cells).snapshots.back();
    bool fine = std::abs(s.t - 0.1) < 1e-12;
    for (int i = 0; i < s.n_cells() && fine; ++i)
      fine = all_finite(s.U[i]) && realizability_check(MomentState(s.U[i])).status !=
                                       Realizability::violated;
    ok = ok && fine;
    detail += std::string("HMP") + std::to_string(N) + (fine ? " ok; " : " FAILED; ");
  }
  return {ok, detail};
}

// 8. Path and quadrature insensitivity.
Outcome criterion8() {
  const auto p = make_problem("riemann");
  double worst = 0.0;
  for (int N : {2, 7, 12}) {
    const auto base = e0_profile(solve(p, ModelKind::hmpn, N, 1000, {1, 10}).snapshots.back());
    for (int k : {2, 5, 10})
      worst = std::max(worst, rel_l2(e0_profile(solve(p, ModelKind::hmpn, N, 1000, {k, 10})
                                                    .snapshots.back()),
                                     base));
    for (int n : {1, 2, 5})
      worst = std::max(worst, rel_l2(e0_profile(solve(p, ModelKind::hmpn, N, 1000, {1, n})
                                                    .snapshots.back()),
                                     base));
  }
  return {worst < 1e-4, "max relative L2 difference " + sci(worst)};
}

// 9. Two-beam steady state.
Outcome criterion9() {
  const auto p = make_problem("two_beam");
  const auto ref_run = solve(p, ModelKind::pn, 30, 1000);
  if (!ref_run.steady_reached) return {false, "PN30 reference not steady"};
  const auto ref = e0_profile(ref_run.snapshots.back());
  std::vector<double> err;
  double asym = 0.0;
  bool steady = true;
  for (int N : {2, 4, 6}) {
    const auto r = solve(p, ModelKind::hmpn, N, 1000);
    steady = steady && r.steady_reached;
    const auto e = e0_profile(r.snapshots.back());
    for (std::size_t i = 0; i < e.size(); ++i) asym = std::max(asym, std::abs(e[i] - e[e.size() - 1 - i]));
    err.push_back(rel_l2(e, ref));
  }
  const bool ok = steady && asym <= 1e-8 && strictly_decreasing(err);
  return {ok, std::string(steady ? "steady" : "NOT steady") + "; asymmetry " + sci(asym) +
                  "; rel L2 to PN30 (N=2,4,6): " + join(err)};
}

// 10. Gaussian source: HMPN and MPN agree, both near PN60.
Outcome criterion10() {
  const auto p = make_problem("gaussian");
  const auto ref = e0_profile(solve(p, ModelKind::pn, 60, 1000).snapshots.back());
  const auto h = e0_profile(solve(p, ModelKind::hmpn, 10, 1000).snapshots.back());
  const auto m = e0_profile(solve(p, ModelKind::mpn, 10, 1000).snapshots.back());
  const double hm = rel_l2(h, m), hr = rel_l2(h, ref), mr = rel_l2(m, ref);
  return {hm < 1e-2 && hr < 5e-2 && mr < 5e-2,
          "HMPN-MPN " + sci(hm) + "; HMPN-PN60 " + sci(hr) + "; MPN-PN60 " + sci(mr)};
}

// 11. Anti-diffusive steady state against the exact solution.
Outcome criterion11() {
  const auto p = make_problem("antidiffusive");
  std::vector<double> err;
  bool steady = true;
  for (int N : {2, 4, 8}) {
    const auto r = solve(p, ModelKind::hmpn, N, 820);
    steady = steady && r.steady_reached;
    const auto& s = r.snapshots.back();
    std::vector<double> ex;
    for (int i = 0; i < s.n_cells(); ++i)
      ex.push_back(antidiffusive_exact_moments(s.grid.center(i), 0)[0]);
    err.push_back(rel_l2(e0_profile(s), ex));
  }
  const bool ok = steady && err.back() < 1e-2 && strictly_decreasing(err);
  return {ok, std::string(steady ? "steady" : "NOT steady") + "; rel L2 (N=2,4,8): " + join(err)};
}

// 12. Su-Olson against PN40.
Outcome criterion12() {
  const auto p = make_problem("su_olson");
  const std::vector<double> times = {1.0, 3.16};
  const auto ref = solve(p, ModelKind::pn, 40, 2000, {}, times).snapshots;
  bool ok = true;
  std::string detail;
  // err[t][j]; NaN once order j has blown up
  std::vector<std::vector<double>> err(3, std::vector<double>(3, NAN));
  const int orders[] = {2, 4, 6};
  for (int j = 0; j < 3; ++j) {
    try {
      const auto snaps = solve(p, ModelKind::hmpn, orders[j], 2000, {}, times).snapshots;
      for (int t = 0; t < 3; ++t) err[t][j] = rel_l2(e0_profile(snaps[t]), e0_profile(ref[t]));
    } catch (const BlowUpDetected& e) {
      ok = false;
      detail += "HMP" + std::to_string(orders[j]) + " blow-up at t=" + fmt("%.4f", e.time()) +
                " (" + e.what() + "); ";
      // still report the output times reached before the blow-up
      for (int t = 0; t < 3 && ref[t].t < e.time(); ++t) {
        const auto pt = make_problem("su_olson", ProblemOverrides::end_time(ref[t].t));
        err[t][j] = rel_l2(e0_profile(solve(pt, ModelKind::hmpn, orders[j], 2000).snapshots.back()),
                           e0_profile(ref[t]));
      }
    }
  }
  for (int t = 0; t < 3; ++t) {
    for (int j = 0; j < 3; ++j) ok = ok && err[t][j] < 5e-2;
    for (int j = 1; j < 3; ++j) ok = ok && err[t][j] <= err[t][j - 1];
    detail += "t=" + fmt("%g", ref[t].t) + " (N=2,4,6): " + join(err[t]) + "; ";
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "HMPN hyperbolicity", criterion1},
      {2, "MPN defects", criterion2},
      {3, "speed structure", criterion3},
      {4, "HMP1 equals MP1", criterion4},
      {5, "source energy conservation", criterion5},
      {6, "free-streaming convergence", criterion6},
      {7, "MPN blow-up detection", criterion7},
      {8, "path insensitivity", criterion8},
      {9, "two-beam steady state", criterion9},
      {10, "Gaussian source", criterion10},
      {11, "anti-diffusive flow", criterion11},
      {12, "Su-Olson", criterion12},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
