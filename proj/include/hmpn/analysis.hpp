#pragma once

// Quasi-linear forms of the MPN and HMPN systems in the variables w = (f_0, alpha, f_2, ..., f_N),
// hyperbolicity classification and the moment-ratio region scans.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "hmpn/basis.hpp"
#include "hmpn/closure.hpp"
#include "hmpn/errors.hpp"

namespace hmpn {

enum class ModelKind { hmpn, mpn, pn };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::hmpn: return "hmpn";
    case ModelKind::mpn: return "mpn";
    case ModelKind::pn: return "pn";
  }
  return "unknown";
}

/// D dw/dt + B dw/dz = 0. For HMPN, D is D~ and B = M~ D~; Lambda and M are kept for the
/// symmetrizer checks.
struct QuasiLinearSystem {
  ModelKind kind = ModelKind::hmpn;
  Eigen::MatrixXd D;
  Eigen::MatrixXd B;
  Eigen::MatrixXd M;       ///< HMPN only: Jacobi matrix of p~
  Eigen::VectorXd Lambda;  ///< HMPN only: K~_kk
};

struct HyperbolicityVerdict {
  std::vector<std::complex<double>> eigenvalues;  ///< sorted by real part
  bool is_real_diagonalizable = false;
  double max_abs_speed = 0.0;
};

/// Jacobi matrix of a monic family: column j holds the coefficients of mu p_j.
inline Eigen::MatrixXd jacobi_matrix(const MonicFamily& fam, int size) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size, size);
  for (int j = 0; j < size; ++j) {
    M(j, j) = fam.a(j);
    if (j + 1 < size) M(j + 1, j) = 1.0;
    if (j > 0) M(j - 1, j) = fam.b(j);
  }
  return M;
}

inline QuasiLinearSystem assemble_hmpn(const SpectralCoeffs& w, const BasisTables& t) {
  const int N = w.order();
  const auto& beta = t.coupling.beta;
  const auto& gamma = t.coupling.gamma;
  const auto& f = w.f;
  const double alpha = w.alpha;

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
  D(0, 0) = beta[0];
  D(0, 1) = gamma[0] * f[0];
  D(1, 0) = alpha;
  D(1, 1) = -4.0 * f[0];
  for (int i = 2; i <= N; ++i) {
    D(i, 1) = gamma[i] * f[i] - (i >= 3 ? 4.0 * f[i - 1] : 0.0);
    if (i >= 3) D(i, i - 1) = alpha;
    D(i, i) = beta[i];
  }

  QuasiLinearSystem sys;
  sys.kind = ModelKind::hmpn;
  sys.M = jacobi_matrix(t.pt, N + 1);
  sys.D = D;
  sys.B = sys.M * D;
  sys.Lambda.resize(N + 1);
  for (int k = 0; k <= N; ++k) sys.Lambda[k] = t.Kt(k);
  return sys;
}

inline QuasiLinearSystem assemble_hmpn(const SpectralCoeffs& w) {
  return assemble_hmpn(w, make_basis_tables(w.alpha, w.order()));
}

/// MPN system tested against p_0..p_N. Column 1 carries the alpha-derivative of the ansatz,
/// dP_k/dalpha = -4 P~_{k+1} + gamma_k P~_k, reduced to the cross tables
///   X_{i,l} = <p_i, p~_l>_{omega~},  Y_{i,l} = <mu p_i, p~_l>_{omega~}.
inline QuasiLinearSystem assemble_mpn(const SpectralCoeffs& w, const BasisTables& t) {
  const int N = w.order();
  const auto& gamma = t.coupling.gamma;
  const auto mu = t.pt.nodes();
  const auto wt = t.pt.weights();
  const std::size_t n = mu.size();

  Eigen::MatrixXd X(N + 1, N + 2), Y(N + 1, N + 2);
  for (int i = 0; i <= N; ++i) {
    const auto pi = t.p.values(i);
    for (int l = 0; l <= N + 1; ++l) {
      const auto pl = t.pt.values(l);
      double x = 0.0, y = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        const double v = wt[q] * pi[q] * pl[q];
        x += v;
        y += v * mu[q];
      }
      X(i, l) = l > i ? 0.0 : x;
      Y(i, l) = l > i + 1 ? 0.0 : y;
    }
  }

  QuasiLinearSystem sys;
  sys.kind = ModelKind::mpn;
  sys.D = Eigen::MatrixXd::Identity(N + 1, N + 1);
  sys.B = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    double dcol = 0.0, bcol = 0.0;
    for (int k = 0; k <= N; ++k) {
      if (k == 1) continue;
      dcol += w.f[k] * (-4.0 * X(i, k + 1) + gamma[k] * X(i, k));
      bcol += w.f[k] * (-4.0 * Y(i, k + 1) + gamma[k] * Y(i, k));
    }
    sys.D(i, 1) = dcol / t.p.norm(i);
    sys.B(i, 1) = bcol / t.p.norm(i);
  }
  for (int j = 0; j <= N; ++j) {
    if (j == 1) continue;
    if (j + 1 <= N) sys.B(j + 1, j) = 1.0;
    sys.B(j, j) = t.p.a(j);
    if (j > 0) sys.B(j - 1, j) = t.p.b(j);
  }
  return sys;
}

inline QuasiLinearSystem assemble_mpn(const SpectralCoeffs& w) {
  return assemble_mpn(w, make_basis_tables(w.alpha, w.order()));
}

namespace detail {

inline bool is_real_eig(std::complex<double> z) {
  return std::abs(z.imag()) <= 1e-8 * std::max(1.0, std::abs(z));
}

}  // namespace detail

inline HyperbolicityVerdict classify(const QuasiLinearSystem& sys) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.D);
  const auto& sv = svd.singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || smax / smin > 1e14)
    throw SingularMatrix("quasi-linear time matrix is numerically singular");

  const Eigen::MatrixXd A = sys.D.partialPivLu().solve(sys.B);
  const Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw SingularMatrix("eigenvalue iteration did not converge");

  HyperbolicityVerdict v;
  const auto& ev = es.eigenvalues();
  v.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(v.eigenvalues.begin(), v.eigenvalues.end(),
            [](auto a, auto b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  for (auto z : v.eigenvalues) v.max_abs_speed = std::max(v.max_abs_speed, std::abs(z));

  v.is_real_diagonalizable =
      std::all_of(v.eigenvalues.begin(), v.eigenvalues.end(), detail::is_real_eig);
  if (!v.is_real_diagonalizable) return v;

  // repeated real roots must carry a full eigenspace
  const int n = static_cast<int>(A.rows());
  const double scale = std::max(1.0, A.norm());
  for (int i = 0; i < n;) {
    int j = i + 1;
    const double lam = v.eigenvalues[i].real();
    while (j < n && std::abs(v.eigenvalues[j].real() - lam) <= 1e-8 * std::max(1.0, std::abs(lam))) ++j;
    const int mult = j - i;
    if (mult > 1) {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A - lam * Eigen::MatrixXd::Identity(n, n));
      lu.setThreshold(1e-10 * scale / std::max(1.0, lu.maxPivot()));
      if (lu.rank() > n - mult) {
        v.is_real_diagonalizable = false;
        return v;
      }
    }
    i = j;
  }
  return v;
}

/// Spectrum of D^{-1} B for MPN without the diagnostics of classify (time-stepping path).
/// D is the identity outside column 1, so it is singular exactly when D(1,1) vanishes.
inline Eigen::VectorXcd mpn_spectrum(const SpectralCoeffs& w, const BasisTables& t) {
  auto sys = assemble_mpn(w, t);
  const double col_scale = sys.D.col(1).cwiseAbs().maxCoeff();
  if (!(std::abs(sys.D(1, 1)) > 1e-14 * col_scale))
    throw SingularMatrix("quasi-linear time matrix is numerically singular");
  // the alpha column scales with E0; rescaling both matrices is a similarity of D^{-1} B and
  // keeps the QR iteration from seeing entries of size 1/E0
  sys.D.col(1) /= col_scale;
  sys.B.col(1) /= col_scale;
  const Eigen::MatrixXd A = sys.D.partialPivLu().solve(sys.B);
  const Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw SingularMatrix("eigenvalue iteration did not converge");
  return es.eigenvalues();
}

/// Characteristic speeds of a state under the given nonlinear model; for MPN these are the real
/// parts of the spectrum of D^{-1} B (the spectrum may be complex).
inline std::vector<double> model_speeds(ModelKind kind, const SpectralCoeffs& w,
                                        const BasisTables& t) {
  if (kind == ModelKind::hmpn) return jacobi_eigenvalues(t.pt, w.order() + 1);
  const auto ev = mpn_spectrum(w, t);
  std::vector<double> out;
  for (auto z : ev) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------------------------
// Region scans

enum class ScanStatus { real, nonreal, unrealizable };

inline const char* to_string(ScanStatus s) {
  switch (s) {
    case ScanStatus::real: return "real";
    case ScanStatus::nonreal: return "nonreal";
    case ScanStatus::unrealizable: return "unrealizable";
  }
  return "unknown";
}

struct ScanPoint {
  double e1_ratio = 0.0;
  double e2_ratio = 0.0;
  ScanStatus status = ScanStatus::unrealizable;
  double max_abs_speed = 0.0;
};

struct ScanGrid {
  double e1_min = -1.0, e1_max = 1.0;
  double e2_min = 0.0, e2_max = 1.0;
  int resolution = 200;
};

namespace detail {

/// Strict interior of the second-order moment cone on [-1, 1]: r1^2 < r2 < 1. The scans fix
/// E3/E0 independently of (r1, r2), as the region plots do.
inline bool second_order_realizable(double r1, double r2) { return r2 > r1 * r1 && r2 < 1.0; }

}  // namespace detail

/// Classifies MPN states (1, r1, r2[, e3]) on a cell-centred grid in (E1/E0, E2/E0).
/// Rows run over e2 fastest within each e1 column.
inline std::vector<ScanPoint> scan_real_region(int N, double e3_over_e0, const ScanGrid& grid) {
  if (N != 2 && N != 3) throw DomainError("region scans are defined for N = 2 and N = 3");
  if (grid.resolution < 1) throw DomainError("scan resolution must be positive");
  std::vector<ScanPoint> out;
  out.reserve(static_cast<std::size_t>(grid.resolution) * grid.resolution);
  const double h1 = (grid.e1_max - grid.e1_min) / grid.resolution;
  const double h2 = (grid.e2_max - grid.e2_min) / grid.resolution;
  for (int i = 0; i < grid.resolution; ++i) {
    for (int j = 0; j < grid.resolution; ++j) {
      ScanPoint p;
      p.e1_ratio = grid.e1_min + (i + 0.5) * h1;
      p.e2_ratio = grid.e2_min + (j + 0.5) * h2;
      if (detail::second_order_realizable(p.e1_ratio, p.e2_ratio)) {
        std::vector<double> E{1.0, p.e1_ratio, p.e2_ratio};
        if (N == 3) E.push_back(e3_over_e0);
        try {
          const auto rc = resolve_closure(MomentState(E));
          const auto v = classify(assemble_mpn(rc.w, rc.tables));
          p.status = v.is_real_diagonalizable ? ScanStatus::real : ScanStatus::nonreal;
          p.max_abs_speed = v.max_abs_speed;
        } catch (const Error&) {
          p.status = ScanStatus::unrealizable;
        }
      }
      out.push_back(p);
    }
  }
  return out;
}

inline void write_scan_csv(std::ostream& os, int N, double e3_over_e0,
                           const std::vector<ScanPoint>& points) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# scan N=%d e3_ratio=%.17g\n", N, e3_over_e0);
  os << buf << "e1_ratio,e2_ratio,status,max_abs_speed\n";
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g\n", p.e1_ratio, p.e2_ratio,
                  to_string(p.status), p.max_abs_speed);
    os << buf;
  }
}

/// Sign-carrying part of grad_w lambda_k . r_k for the HMPN system:
///   (d lambda_k / d alpha) (lambda_k - E1/E0).
inline double genuine_nonlinearity_indicator(const SpectralCoeffs& w, int k) {
  const int N = w.order();
  if (k < 0 || k > N) throw DomainError("field index out of range");
  const double h = 1e-6;
  const double a = std::clamp(w.alpha, -kAlphaLimit + h, kAlphaLimit - h);
  const double dlam =
      (characteristic_speeds(a + h, N)[k] - characteristic_speeds(a - h, N)[k]) / (2 * h);
  const auto wm = weight_moments(w.alpha, 4, 1);
  const double lam = characteristic_speeds(w.alpha, N)[k];
  return dlam * (lam - wm.values[1] / wm.values[0]);
}

}  // namespace hmpn
