#pragma once

// Moment state <-> closure coefficient conversions for the MPN ansatz
//   I(mu) = sum_i f_i p_i(mu) (1 + alpha mu)^-4,   f_1 = 0.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hmpn/basis.hpp"
#include "hmpn/errors.hpp"

namespace hmpn {

/// Largest |E1/E0| used by the closure; ratios beyond it are clamped.
inline constexpr double kRatioLimit = 1.0 - 1e-10;

struct MomentState {
  std::vector<double> E;  ///< E_0 .. E_N

  MomentState() = default;
  explicit MomentState(std::vector<double> e) : E(std::move(e)) {}
  int order() const { return static_cast<int>(E.size()) - 1; }
};

struct SpectralCoeffs {
  std::vector<double> f;  ///< f_0 .. f_N with f_1 = 0
  double alpha = 0.0;

  int order() const { return static_cast<int>(f.size()) - 1; }
};

/// alpha = -3r / (2 + sqrt(4 - 3r^2)); |r| is clamped to kRatioLimit.
inline double alpha_from_flux_ratio(double r) {
  if (!std::isfinite(r)) throw DomainError("flux ratio is not finite");
  r = std::clamp(r, -kRatioLimit, kRatioLimit);
  const double alpha = -3.0 * r / (2.0 + std::sqrt(4.0 - 3.0 * r * r));
  return std::clamp(alpha, -kAlphaLimit, kAlphaLimit);
}

enum class Realizability { ok, clamped, violated };

struct RealizabilityDiagnosis {
  Realizability status = Realizability::ok;
  int index = -1;  ///< offending moment for violated states
};

inline RealizabilityDiagnosis realizability_check(const MomentState& U) {
  if (U.E.size() < 2) return {Realizability::violated, static_cast<int>(U.E.size())};
  for (std::size_t k = 0; k < U.E.size(); ++k)
    if (!std::isfinite(U.E[k])) return {Realizability::violated, static_cast<int>(k)};
  if (!(U.E[0] > 0.0)) return {Realizability::violated, 0};
  const double r = std::abs(U.E[1] / U.E[0]);
  if (r > 1.0) return {Realizability::violated, 1};
  if (r >= kRatioLimit) return {Realizability::clamped, -1};
  return {};
}

/// f-recursion on precomputed tables: f_i = (E_i - sum_{j<i} K_{i,j} f_j) / K_{i,i}, f_1 = 0.
inline SpectralCoeffs coeffs_from_tables(const std::vector<double>& E, const BasisTables& t) {
  const int N = static_cast<int>(E.size()) - 1;
  SpectralCoeffs w;
  w.alpha = t.alpha;
  w.f.assign(N + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    if (i == 1) continue;
    double s = E[i];
    for (int j = 0; j < i; ++j) s -= t.K(i, j) * w.f[j];
    w.f[i] = s / t.K(i, i);
  }
  return w;
}

inline std::vector<double> moments_from_tables(const SpectralCoeffs& w, const BasisTables& t,
                                               int rows) {
  std::vector<double> E(rows, 0.0);
  for (int k = 0; k < rows; ++k)
    for (int j = 0; j <= std::min(k, w.order()); ++j) E[k] += t.K(k, j) * w.f[j];
  return E;
}

/// Coefficients plus the tables they were computed on.
struct ResolvedClosure {
  SpectralCoeffs w;
  BasisTables tables;
  bool clamped = false;
};

/// Converts U to closure coefficients. With strict = true, states beyond |E1/E0| = 1 are
/// rejected; otherwise any |E1/E0| >= kRatioLimit is clamped (used during time stepping).
inline ResolvedClosure resolve_closure(const MomentState& U, bool strict = true) {
  const int N = U.order();
  if (N < 1 || N > kMaxOrder) throw DomainError("order out of range: " + std::to_string(N));
  for (int k = 0; k <= N; ++k)
    if (!std::isfinite(U.E[k])) throw RealizabilityError("non-finite moment", k);
  if (!(U.E[0] > 0.0)) throw RealizabilityError("E0 must be positive", 0);
  const double r = U.E[1] / U.E[0];
  if (strict && std::abs(r) > 1.0) throw RealizabilityError("|E1/E0| exceeds 1", 1);

  ResolvedClosure out;
  out.clamped = std::abs(r) >= kRatioLimit;
  out.tables = make_basis_tables(alpha_from_flux_ratio(r), N);
  out.w = coeffs_from_tables(U.E, out.tables);
  if (!out.clamped) {
    const double residual = U.E[1] - out.tables.K(1, 0) * out.w.f[0];
    if (std::abs(residual) > 1e-10 * U.E[0])
      throw AccuracyError("closure coefficient f1 does not vanish, residual " +
                          std::to_string(residual));
  }
  if (!(out.w.f[0] > 0.0)) throw RealizabilityError("f0 must be positive", 0);
  return out;
}

inline SpectralCoeffs moments_to_coeffs(const MomentState& U) { return resolve_closure(U).w; }

inline MomentState coeffs_to_moments(const SpectralCoeffs& w) {
  const auto t = make_basis_tables(w.alpha, w.order());
  return MomentState(moments_from_tables(w, t, w.order() + 1));
}

/// (E_1, ..., E_N, E_{N+1}) with E_{N+1} = sum_k K_{N+1,k} f_k.
inline std::vector<double> closure_flux_from(const std::vector<double>& E,
                                             const ResolvedClosure& rc) {
  const int N = static_cast<int>(E.size()) - 1;
  std::vector<double> F(E.begin() + 1, E.end());
  double top = 0.0;
  for (int k = 0; k <= N; ++k) top += rc.tables.K(N + 1, k) * rc.w.f[k];
  F.push_back(top);
  return F;
}

inline std::vector<double> closure_flux(const MomentState& U) {
  return closure_flux_from(U.E, resolve_closure(U));
}

struct RegularizationMultipliers {
  double cf = 0.0;  ///< multiplies d f_N / dz
  double ca = 0.0;  ///< multiplies d alpha / dz
};

/// R_N = K~_{N+1,N+1} (alpha d f_N/dz - 4 f_N d alpha/dz) = cf d f_N/dz + ca d alpha/dz.
inline RegularizationMultipliers regularization_multipliers(const SpectralCoeffs& w) {
  const int N = w.order();
  const double kt = regularization_norm(w.alpha, N);
  return {kt * w.alpha, -4.0 * kt * (N == 1 ? 0.0 : w.f[N])};
}

/// I(mu) = sum_i f_i p_i(mu) omega(mu; alpha)
inline double ansatz_eval(const SpectralCoeffs& w, double mu) {
  const auto t = make_basis_tables(w.alpha, std::max(w.order(), 1));
  double s = 0.0;
  for (int i = 0; i <= w.order(); ++i) s += w.f[i] * t.p.eval(mu, i);
  return s * std::pow(1.0 + w.alpha * mu, -4.0);
}

}  // namespace hmpn
