#pragma once

// Path-conservative finite-volume scheme for HMPN / MPN and the linear PN model:
// Lie splitting of HLL convection (with DLM fluctuations for the regularization term) and an
// implicit Euler source step coupled to the material energy.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hmpn/analysis.hpp"
#include "hmpn/basis.hpp"
#include "hmpn/closure.hpp"
#include "hmpn/errors.hpp"
#include "hmpn/pn.hpp"
#include "hmpn/quadrature.hpp"

namespace hmpn {

struct Grid {
  double z_left = 0.0;
  double z_right = 1.0;
  int n_cells = 4;

  Grid() = default;
  Grid(double zl, double zr, int n) : z_left(zl), z_right(zr), n_cells(n) {
    if (n < 4) throw ValidationError("grid needs at least 4 cells", "n_cells");
    if (!(zr > zl)) throw ValidationError("empty domain", "z_right");
  }
  double dz() const { return (z_right - z_left) / n_cells; }
  double center(int i) const { return z_left + (i + 0.5) * dz(); }
  double face(int i) const { return z_left + i * dz(); }
};

/// An intensity as a discrete measure in mu: int g(mu) I(mu) dmu = sum_q w_q g(mu_q).
struct DirectionalMeasure {
  std::vector<double> mu;
  std::vector<double> w;

  static DirectionalMeasure isotropic(double intensity, int nodes = 64) {
    const auto rule = gauss_legendre(nodes);
    DirectionalMeasure m;
    m.mu = rule.nodes;
    for (double gw : rule.weights) m.w.push_back(gw * intensity);
    return m;
  }

  DirectionalMeasure scaled(double s) const {
    DirectionalMeasure m = *this;
    for (double& x : m.w) x *= s;
    return m;
  }

  std::vector<double> monomial_moments(int K) const {
    std::vector<double> E(K + 1, 0.0);
    for (std::size_t q = 0; q < mu.size(); ++q) {
      double p = w[q];
      for (int k = 0; k <= K; ++k, p *= mu[q]) E[k] += p;
    }
    return E;
  }

  std::vector<double> legendre_moments(int N) const {
    std::vector<double> phi(N + 1, 0.0);
    for (std::size_t q = 0; q < mu.size(); ++q) {
      const auto P = legendre_values(mu[q], N);
      for (int l = 0; l <= N; ++l) phi[l] += w[q] * P[l];
    }
    return phi;
  }
};

enum class Coupling { none, fixed_temperature, energy };

/// e(T), de/dT and the inverse T(e).
struct EnergyLaw {
  std::function<double(double)> e;
  std::function<double(double)> de_dT;
  std::function<double(double)> inverse;

  /// e = a T^4
  static EnergyLaw radiation(double a) {
    return {[a](double T) { return a * T * T * T * T; },
            [a](double T) { return 4.0 * a * T * T * T; },
            [a](double e) { return std::pow(std::max(e, 0.0) / a, 0.25); }};
  }
};

struct Material {
  std::function<double(double z, double T)> sigma_a = [](double, double) { return 0.0; };
  std::function<double(double z, double T)> sigma_s = [](double, double) { return 0.0; };
  std::function<double(double z)> source = [](double) { return 0.0; };
  Coupling coupling = Coupling::none;
  std::function<double(double z)> temperature;  ///< fixed_temperature mode
  EnergyLaw energy = EnergyLaw::radiation(1.0);
  double a = 1.0;
  double c = 1.0;
};

enum class BcKind { infinite, reflective, vacuum, inflow };
enum class Side { left, right };

struct BoundaryCondition {
  BcKind kind = BcKind::infinite;
  std::function<double(double mu)> inflow;  ///< incoming intensity for BcKind::inflow

  static BoundaryCondition infinite() { return {BcKind::infinite, {}}; }
  static BoundaryCondition reflective() { return {BcKind::reflective, {}}; }
  static BoundaryCondition vacuum() { return {BcKind::vacuum, {}}; }
  static BoundaryCondition inflow_intensity(std::function<double(double)> I) {
    return {BcKind::inflow, std::move(I)};
  }
  static BoundaryCondition inflow_isotropic(double I) {
    return inflow_intensity([I](double) { return I; });
  }
};

struct PathSpec {
  int exponent = 1;
  int simpson_intervals = 1;
};

enum class Variables { monomial, legendre };

struct FieldState {
  ModelKind model = ModelKind::hmpn;
  int order = 1;
  Variables vars = Variables::monomial;
  Grid grid;
  std::vector<std::vector<double>> U;  ///< per cell; Legendre moments when vars == legendre
  std::vector<double> e;
  std::vector<double> T;
  double t = 0.0;

  int n_cells() const { return grid.n_cells; }

  /// Monomial moments E_0..E_N of cell i.
  std::vector<double> moments(int i) const {
    return vars == Variables::monomial ? U[i] : legendre_to_monomial(U[i], order);
  }
};

inline Variables variables_for(ModelKind m) {
  return m == ModelKind::pn ? Variables::legendre : Variables::monomial;
}

// ---------------------------------------------------------------------------------------------
// Interface fluxes

/// HLL flux from precomputed physical fluxes.
inline std::vector<double> hll_flux(const std::vector<double>& UL, const std::vector<double>& UR,
                                    const std::vector<double>& FL, const std::vector<double>& FR,
                                    double lamL, double lamR) {
  if (lamL >= 0.0) return FL;
  if (lamR <= 0.0) return FR;
  std::vector<double> F(FL.size());
  const double inv = 1.0 / (lamR - lamL);
  for (std::size_t k = 0; k < F.size(); ++k)
    F[k] = (lamR * FL[k] - lamL * FR[k] + lamL * lamR * (UR[k] - UL[k])) * inv;
  return F;
}

inline std::vector<double> hll_flux(const MomentState& UL, const MomentState& UR, double lamL,
                                    double lamR) {
  if (lamL > lamR) throw DomainError("HLL speeds out of order");
  return hll_flux(UL.E, UR.E, closure_flux(UL), closure_flux(UR), lamL, lamR);
}

/// g_N of the regularization term along gamma(tau) = w_L + tau^k (w_R - w_L):
///   g_N = -int_0^1 K~_{N+1,N+1}(alpha) [alpha f_N' - 4 f_N alpha'] dtau.
/// kt_left / kt_right are K~_{N+1,N+1} at the end states (NaN to recompute).
inline double path_integral(const SpectralCoeffs& wL, const SpectralCoeffs& wR,
                            const PathSpec& path, double kt_left = NAN, double kt_right = NAN) {
  const int N = wL.order();
  if (N == 1) return 0.0;
  const double dalpha = wR.alpha - wL.alpha, df = wR.f[N] - wL.f[N];
  if (dalpha == 0.0 && df == 0.0) return 0.0;
  const int k = path.exponent;
  auto integrand = [&](double tau) {
    const double s = std::pow(tau, k), ds = k * std::pow(tau, k - 1);
    double kt;
    if (tau == 0.0 && std::isfinite(kt_left))
      kt = kt_left;
    else if (tau == 1.0 && std::isfinite(kt_right))
      kt = kt_right;
    else
      kt = regularization_norm(wL.alpha + s * dalpha, N);
    const double alpha = wL.alpha + s * dalpha, fN = wL.f[N] + s * df;
    return -kt * ds * (alpha * df - 4.0 * fN * dalpha);
  };
  return compound_simpson(integrand, 0.0, 1.0, path.simpson_intervals);
}

struct Fluctuations {
  std::vector<double> minus;  ///< R^-_{i+1/2}, charged to the left cell
  std::vector<double> plus;   ///< R^+_{i+1/2}, charged to the right cell
};

/// Splits g (nonzero only in row N) between the two sides of an interface.
inline Fluctuations distribute_fluctuation(int N, double g, double lamL, double lamR) {
  Fluctuations r{std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, 0.0)};
  if (lamL >= 0.0) {
    r.plus[N] = -g;
  } else if (lamR <= 0.0) {
    r.minus[N] = g;
  } else {
    r.minus[N] = -lamL * g / (lamR - lamL);
    r.plus[N] = -lamR * g / (lamR - lamL);
  }
  return r;
}

inline Fluctuations path_fluctuations(const SpectralCoeffs& wL, const SpectralCoeffs& wR,
                                      double lamL, double lamR, const PathSpec& path) {
  return distribute_fluctuation(wL.order(), path_integral(wL, wR, path), lamL, lamR);
}

// ---------------------------------------------------------------------------------------------
// Boundary fluxes

namespace detail {

inline const QuadratureRule& gl64() {
  static const QuadratureRule rule = gauss_legendre(64);
  return rule;
}

/// int over the outer half of mu^{k+1} I_in (or mu P_l I_in), k = 0..N
inline std::vector<double> inflow_moments(Side side, const BoundaryCondition& bc, int N,
                                          Variables vars) {
  const auto& rule = gl64();
  std::vector<double> out(N + 1, 0.0);
  const double lo = side == Side::left ? 0.0 : -1.0, hi = lo + 1.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double mu = 0.5 * (lo + hi) + 0.5 * rule.nodes[q];
    const double v = 0.5 * rule.weights[q] * mu * bc.inflow(mu);
    if (vars == Variables::monomial) {
      double p = v;
      for (int k = 0; k <= N; ++k, p *= mu) out[k] += p;
    } else {
      const auto P = legendre_values(mu, N);
      for (int l = 0; l <= N; ++l) out[l] += v * P[l];
    }
  }
  return out;
}

/// Combines the interior-half integrals with the outside intensity; the infinite case is the
/// full-range flux of the interior state.
inline std::vector<double> combine_boundary(Side side, const BoundaryCondition& bc,
                                            const std::vector<double>& inner,
                                            const std::vector<double>& full_flux,
                                            Variables vars) {
  const int N = static_cast<int>(inner.size()) - 1;
  std::vector<double> F = inner;
  switch (bc.kind) {
    case BcKind::infinite:
      return full_flux;
    case BcKind::reflective:
      // I_out(mu) = I(-mu): the mirrored integral carries (-1)^{k+1}
      for (int k = 0; k <= N; ++k) F[k] += (k % 2 == 0 ? -1.0 : 1.0) * inner[k];
      break;
    case BcKind::vacuum:
      break;
    case BcKind::inflow: {
      const auto in = inflow_moments(side, bc, N, vars);
      for (int k = 0; k <= N; ++k) F[k] += in[k];
      break;
    }
  }
  return F;
}

inline std::vector<double> ansatz_half_moments(const SpectralCoeffs& w, const MonicFamily& p,
                                               double mu_a, double mu_b) {
  const int N = w.order();
  const auto rule = make_weight_rule(w.alpha, mu_a, mu_b);
  const auto& W = rule.weights(4);
  std::vector<double> out(N + 1, 0.0);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double mu = rule.mu[q];
    double I = 0.0;
    for (int i = 0; i <= N; ++i)
      if (w.f[i] != 0.0) I += w.f[i] * p.eval(mu, i);
    double m = W[q] * I * mu;
    for (int k = 0; k <= N; ++k, m *= mu) out[k] += m;
  }
  return out;
}

inline std::vector<double> legendre_half_moments(const std::vector<double>& phi,
                                                 const QuadratureRule& rule, double mu_a,
                                                 double mu_b) {
  const int N = static_cast<int>(phi.size()) - 1;
  std::vector<double> out(N + 1, 0.0);
  const double mid = 0.5 * (mu_a + mu_b), half = 0.5 * (mu_b - mu_a);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double mu = mid + half * rule.nodes[q];
    const auto P = legendre_values(mu, N);
    double I = 0.0;
    for (int l = 0; l <= N; ++l) I += 0.5 * (2 * l + 1) * phi[l] * P[l];
    const double v = half * rule.weights[q] * mu * I;
    for (int l = 0; l <= N; ++l) out[l] += v * P[l];
  }
  return out;
}

}  // namespace detail


/// Full-range flux (E_1, ..., E_{N+1}) of the ansatz with coefficients w.
inline std::vector<double> ansatz_flux(const SpectralCoeffs& w) {
  const auto t = make_basis_tables(w.alpha, w.order());
  auto E = moments_from_tables(w, t, w.order() + 2);
  return {E.begin() + 1, E.end()};
}

/// Boundary flux F^B_k = int_{interior half} mu^{k+1} I(mu; w) + int_{outer half} mu^{k+1} I_out.
/// Half-range integrals of the ansatz use the weighted rule restricted to the half interval.
inline std::vector<double> boundary_flux(Side side, const BoundaryCondition& bc,
                                         const SpectralCoeffs& w) {
  if (bc.kind == BcKind::infinite) return ansatz_flux(w);
  const MonicFamily p(make_weight_rule(w.alpha), 4, w.order());
  const double in_a = side == Side::left ? -1.0 : 0.0;
  const auto inner = detail::ansatz_half_moments(w, p, in_a, in_a + 1.0);
  return detail::combine_boundary(side, bc, inner, {}, Variables::monomial);
}

/// Same for PN in Legendre variables: F^B_l = int mu P_l I^B dmu.
inline std::vector<double> pn_boundary_flux(Side side, const BoundaryCondition& bc,
                                            const std::vector<double>& phi) {
  if (bc.kind == BcKind::infinite) return pn_legendre_flux(phi);
  const int N = static_cast<int>(phi.size()) - 1;
  const auto rule = gauss_legendre(std::max(64, N + 2));
  const double in_a = side == Side::left ? -1.0 : 0.0;
  const auto inner = detail::legendre_half_moments(phi, rule, in_a, in_a + 1.0);
  return detail::combine_boundary(side, bc, inner, {}, Variables::legendre);
}

// ---------------------------------------------------------------------------------------------
// Source step

/// C_k = int mu^k S dmu for the isotropic scattering/emission source.
inline std::vector<double> source_moments(const MomentState& U, double T, const Material& mat,
                                          double z = 0.0) {
  const double sa = mat.sigma_a(z, T), ss = mat.sigma_s(z, T), st = sa + ss;
  const double emission = mat.coupling == Coupling::none ? 0.0 : mat.a * mat.c * sa * T * T * T * T;
  const double iso = ss * U.E[0] + emission + mat.source(z);
  std::vector<double> C(U.E.size());
  for (std::size_t k = 0; k < C.size(); ++k)
    C[k] = (k % 2 == 0 ? iso / (k + 1.0) : 0.0) - st * U.E[k];
  return C;
}

struct CellSourceResult {
  std::vector<double> U;
  double e = 0.0;
  double T = 0.0;
};

namespace detail {

/// Solves e(T) - e_n - dt sigma_a(T) (c (W - e(T)) - a c T^4) = 0 for T.
inline double solve_temperature(const Material& mat, double z, double e_n, double W, double dt,
                                double T_guess, int cell) {
  const double a = mat.a, c = mat.c;
  const auto& law = mat.energy;
  auto residual = [&](double T) {
    return law.e(T) - e_n - dt * mat.sigma_a(z, T) * (c * (W - law.e(T)) - a * c * T * T * T * T);
  };
  const double T_max = law.inverse(W);
  const double scale = std::max({std::abs(e_n), std::abs(W), std::numeric_limits<double>::min()});
  double T = std::clamp(T_guess, 0.0, T_max);
  for (int it = 0; it < 50; ++it) {
    const double r = residual(T);
    if (std::abs(r) <= 1e-12 * scale) return T;
    const double sa = mat.sigma_a(z, T);
    const double dr = law.de_dT(T) * (1.0 + dt * sa * c) + 4.0 * dt * sa * a * c * T * T * T;
    if (!(dr > 0.0) || !std::isfinite(dr)) break;
    const double next = T - r / dr;
    if (!(next >= 0.0 && next <= T_max)) break;
    T = next;
  }
  // bisection on [0, T_max]; the residual is increasing in T
  double lo = 0.0, hi = T_max;
  if (residual(lo) > 0.0 || residual(hi) < 0.0)
    throw NewtonDivergence("temperature solve has no bracket", cell, residual(T));
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(hi, 1e-300); ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  T = 0.5 * (lo + hi);
  const double r = residual(T);
  // accept the bisection limit when the residual is at rounding level of its terms
  if (!std::isfinite(r) || std::abs(r) > 1e-10 * scale)
    throw NewtonDivergence("temperature solve did not converge", cell, r);
  return T;
}

}  // namespace detail

/// Implicit Euler for (1/c) dU/dt = C(U, T) coupled with de/dt = sigma_a (E_0 - a c T^4).
/// Works on monomial (vars = monomial) or Legendre (vars = legendre) moments; only row 0 is
/// isotropic in both.
inline CellSourceResult implicit_source_cell(const std::vector<double>& U, double e, double T,
                                             double dt, const Material& mat, double z,
                                             Variables vars, int cell = -1) {
  CellSourceResult out{U, e, T};
  if (dt == 0.0) return out;
  const double c = mat.c, cdt = c * dt;
  double sa = mat.sigma_a(z, T), ss = mat.sigma_s(z, T);
  const double s = mat.source(z);
  double E0 = U[0];
  double emission = 0.0;
  switch (mat.coupling) {
    case Coupling::none:
      E0 = (U[0] + cdt * s) / (1.0 + cdt * sa);
      break;
    case Coupling::fixed_temperature: {
      const double T4 = T * T * T * T;
      emission = mat.a * c * sa * T4;
      E0 = (U[0] + cdt * (emission + s)) / (1.0 + cdt * sa);
      break;
    }
    case Coupling::energy: {
      const double W = e + U[0] / c + dt * s;
      const double Tn = detail::solve_temperature(mat, z, e, W, dt, T, cell);
      const double en = mat.energy.e(Tn);
      out.T = Tn;
      out.e = en;
      E0 = c * (W - en);
      sa = mat.sigma_a(z, Tn);
      ss = mat.sigma_s(z, Tn);
      emission = mat.a * c * sa * Tn * Tn * Tn * Tn;
      break;
    }
  }
  const double damp = 1.0 / (1.0 + cdt * (sa + ss));
  const double iso = ss * E0 + emission + s;
  out.U[0] = E0;
  for (std::size_t k = 1; k < U.size(); ++k) {
    const bool isotropic_row = vars == Variables::monomial && k % 2 == 0;
    out.U[k] = (U[k] + (isotropic_row ? cdt * iso / (k + 1.0) : 0.0)) * damp;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Convection

/// Per-cell quantities computed once per step.
struct CellData {
  std::vector<double> flux;
  SpectralCoeffs w;
  double kt_top = NAN;  ///< K~_{N+1,N+1}(alpha), HMPN only
  double lam_min = 0.0;
  double lam_max = 0.0;
};

/// MPN speeds beyond this bound are treated as a blow-up of the model.
inline constexpr double kMaxModelSpeed = 1e3;

/// pn_speed: largest PN speed for this order (computed once per step by the caller).
inline CellData cell_data(ModelKind model, const std::vector<double>& U, double pn_speed = NAN) {
  CellData d;
  if (model == ModelKind::pn) {
    d.flux = pn_legendre_flux(U);
    d.lam_max = std::isfinite(pn_speed) ? pn_speed : pn_max_speed(static_cast<int>(U.size()) - 1);
    d.lam_min = -d.lam_max;
    return d;
  }
  const MomentState st(U);
  // |E1/E0| >= 1 - 1e-10 is clamped inside the closure rather than rejected
  const auto rc = resolve_closure(st, false);
  d.flux = closure_flux_from(U, rc);
  d.w = rc.w;
  const int N = st.order();
  if (model == ModelKind::hmpn) {
    const auto speeds = jacobi_eigenvalues(rc.tables.pt, N + 1);
    d.lam_min = speeds.front();
    d.lam_max = speeds.back();
    d.kt_top = rc.tables.Kt(N + 1);
  } else {
    const auto speeds = model_speeds(ModelKind::mpn, rc.w, rc.tables);
    d.lam_min = *std::min_element(speeds.begin(), speeds.end());
    d.lam_max = *std::max_element(speeds.begin(), speeds.end());
    if (!(std::max(-d.lam_min, d.lam_max) < kMaxModelSpeed))
      throw SingularMatrix("characteristic speed out of range");
  }
  return d;
}

inline bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Per-cell data for a whole field; any closure failure is reported as a blow-up.
inline std::vector<CellData> prepare_cells(const FieldState& s) {
  std::vector<CellData> cells(s.n_cells());
  const double pn_speed = s.model == ModelKind::pn ? pn_max_speed(s.order) : NAN;
  for (int i = 0; i < s.n_cells(); ++i) {
    if (!all_finite(s.U[i]))
      throw BlowUpDetected("non-finite moments in cell " + std::to_string(i), i, s.t);
    try {
      cells[i] = cell_data(s.model, s.U[i], pn_speed);
    } catch (const Error& err) {
      throw BlowUpDetected("cell " + std::to_string(i) + ": " + err.what(), i, s.t);
    }
  }
  return cells;
}

inline double stable_dt(const FieldState& s, const std::vector<CellData>& cells, double cfl,
                        double c) {
  double lam = 0.0;
  for (const auto& d : cells) lam = std::max({lam, std::abs(d.lam_min), std::abs(d.lam_max)});
  return cfl * s.grid.dz() / (c * lam);
}

inline double stable_dt(const FieldState& s, double cfl, double c = 1.0) {
  if (!(cfl > 0.0 && cfl < 1.0)) throw ValidationError("cfl must lie in (0,1)", "cfl");
  return stable_dt(s, prepare_cells(s), cfl, c);
}

inline FieldState convection_step(const FieldState& s, const std::vector<CellData>& cells,
                                  double dt, const PathSpec& path, const BoundaryCondition& bc_left,
                                  const BoundaryCondition& bc_right, double c = 1.0) {
  const int n = s.n_cells(), N = s.order;
  std::vector<std::vector<double>> F(n + 1);
  std::vector<std::vector<double>> Rm(n + 1, std::vector<double>(N + 1, 0.0));
  std::vector<std::vector<double>> Rp(n + 1, std::vector<double>(N + 1, 0.0));

  auto boundary = [&](Side side, const BoundaryCondition& bc, int cell) {
    if (bc.kind == BcKind::infinite) return cells[cell].flux;
    if (s.model == ModelKind::pn) return pn_boundary_flux(side, bc, s.U[cell]);
    return boundary_flux(side, bc, cells[cell].w);
  };
  F[0] = boundary(Side::left, bc_left, 0);
  F[n] = boundary(Side::right, bc_right, n - 1);
  for (int j = 1; j < n; ++j) {
    const auto& L = cells[j - 1];
    const auto& R = cells[j];
    const double lamL = std::min(L.lam_min, R.lam_min), lamR = std::max(L.lam_max, R.lam_max);
    F[j] = hll_flux(s.U[j - 1], s.U[j], L.flux, R.flux, lamL, lamR);
    if (s.model == ModelKind::hmpn && N > 1) {
      const double g = path_integral(L.w, R.w, path, L.kt_top, R.kt_top);
      auto fl = distribute_fluctuation(N, g, lamL, lamR);
      Rm[j] = std::move(fl.minus);
      Rp[j] = std::move(fl.plus);
    }
  }

  FieldState out = s;
  const double ratio = c * dt / s.grid.dz();
  for (int i = 0; i < n; ++i) {
    auto& U = out.U[i];
    for (int k = 0; k <= N; ++k)
      U[k] -= ratio * ((F[i + 1][k] - F[i][k]) + (Rm[i + 1][k] - Rp[i][k]));
    if (!all_finite(U))
      throw BlowUpDetected("non-finite moments in cell " + std::to_string(i), i, s.t + dt);
    if (s.model != ModelKind::pn && !(U[0] > 0.0))
      throw BlowUpDetected("E0 <= 0 in cell " + std::to_string(i), i, s.t + dt);
  }
  return out;
}

inline FieldState convection_step(const FieldState& s, double dt, const PathSpec& path,
                                  const BoundaryCondition& bc_left,
                                  const BoundaryCondition& bc_right, double c = 1.0) {
  return convection_step(s, prepare_cells(s), dt, path, bc_left, bc_right, c);
}

inline FieldState implicit_source_step(const FieldState& s, double dt, const Material& mat) {
  FieldState out = s;
  for (int i = 0; i < s.n_cells(); ++i) {
    auto r = implicit_source_cell(s.U[i], s.e[i], s.T[i], dt, mat, s.grid.center(i), s.vars, i);
    out.U[i] = std::move(r.U);
    out.e[i] = r.e;
    out.T[i] = r.T;
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Driver

struct Problem {
  std::string name;
  double z_left = 0.0;
  double z_right = 1.0;
  std::function<DirectionalMeasure(double z)> initial_intensity;
  std::function<double(double z)> initial_temperature = [](double) { return 0.0; };
  Material material;
  BoundaryCondition bc_left;
  BoundaryCondition bc_right;
  double t_end = 0.0;
  bool steady_state = false;
};

struct RunSettings {
  ModelKind model = ModelKind::hmpn;
  int order = 2;
  int n_cells = 100;
  double cfl = 0.95;
  PathSpec path;
  std::vector<double> snapshot_times;  ///< extra output times before t_end
  double steady_tol = 1e-10;
  double steady_t_max = 1e3;  ///< give up on a steady state after this time
};

struct RunResult {
  std::vector<FieldState> snapshots;  ///< requested times in order; the final state last
  bool steady_reached = false;
  long steps = 0;
};

inline FieldState initial_state(const Problem& p, ModelKind model, int order, int n_cells) {
  if (order < 1) throw ValidationError("order must be at least 1", "order");
  if (model != ModelKind::pn && order > kMaxOrder)
    throw ValidationError("order exceeds " + std::to_string(kMaxOrder), "order");
  FieldState s;
  s.model = model;
  s.order = order;
  s.vars = variables_for(model);
  s.grid = Grid(p.z_left, p.z_right, n_cells);
  s.U.resize(n_cells);
  s.e.assign(n_cells, 0.0);
  s.T.assign(n_cells, 0.0);
  for (int i = 0; i < n_cells; ++i) {
    const double z = s.grid.center(i);
    const auto I = p.initial_intensity(z);
    s.U[i] = s.vars == Variables::legendre ? I.legendre_moments(order) : I.monomial_moments(order);
    const auto& mat = p.material;
    if (mat.coupling == Coupling::fixed_temperature) {
      s.T[i] = mat.temperature(z);
    } else if (mat.coupling == Coupling::energy) {
      s.T[i] = p.initial_temperature(z);
      s.e[i] = mat.energy.e(s.T[i]);
    }
  }
  return s;
}

namespace detail {

inline double max_abs(const std::vector<std::vector<double>>& U) {
  double m = 0.0;
  for (const auto& u : U)
    for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<std::vector<double>>& A,
                           const std::vector<std::vector<double>>& B) {
  double m = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t k = 0; k < A[i].size(); ++k) m = std::max(m, std::abs(A[i][k] - B[i][k]));
  return m;
}

}  // namespace detail

/// One Lie step (convection, then source). Returns the step actually taken.
inline double advance(FieldState& s, const Problem& p, const RunSettings& rs, double dt_cap) {
  const auto cells = prepare_cells(s);
  const double dt = std::min(stable_dt(s, cells, rs.cfl, p.material.c), dt_cap);
  auto next = convection_step(s, cells, dt, rs.path, p.bc_left, p.bc_right, p.material.c);
  try {
    next = implicit_source_step(next, dt, p.material);
  } catch (const NewtonDivergence& err) {
    throw NewtonDivergence(std::string(err.what()) + " at t=" + std::to_string(s.t + dt),
                           err.cell(), err.residual());
  }
  for (int i = 0; i < s.n_cells(); ++i)
    if (!all_finite(next.U[i]) || !std::isfinite(next.e[i]))
      throw BlowUpDetected("non-finite state in cell " + std::to_string(i), i, s.t + dt);
  next.t = s.t + dt;
  s = std::move(next);
  return dt;
}

/// Runs to t_end (recording snapshots) or, for steady problems, until
/// max|dU| / (dt max|U|) < steady_tol.
inline RunResult run(const Problem& p, const RunSettings& rs) {
  if (!(rs.cfl > 0.0 && rs.cfl < 1.0)) throw ValidationError("cfl must lie in (0,1)", "cfl");
  RunResult res;
  FieldState s = initial_state(p, rs.model, rs.order, rs.n_cells);

  if (p.steady_state) {
    while (s.t < rs.steady_t_max) {
      const auto before = s.U;
      const double dt = advance(s, p, rs, rs.steady_t_max - s.t);
      ++res.steps;
      const double change = detail::max_abs_diff(s.U, before) / (dt * detail::max_abs(s.U));
      if (change < rs.steady_tol) {
        res.steady_reached = true;
        break;
      }
    }
    res.snapshots.push_back(s);
    return res;
  }

  std::vector<double> times;
  for (double t : rs.snapshot_times)
    if (t > 0.0 && t < p.t_end) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.push_back(p.t_end);
  for (double target : times) {
    while (s.t < target) {
      advance(s, p, rs, target - s.t);
      ++res.steps;
      // absorb a rounding-level remainder into the snapshot time
      if (target - s.t <= 1e-12 * std::max(1.0, target)) s.t = target;
    }
    res.snapshots.push_back(s);
  }
  return res;
}

}  // namespace hmpn
