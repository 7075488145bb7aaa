#pragma once

// Linear PN reference model. Internally the solver advances Legendre moments
//   phi_l = int P_l(mu) I dmu,   I = sum_l (2l+1)/2 phi_l P_l(mu),
// which stay well conditioned up to N ~ 100; monomial moments are produced only for output.

#include <cmath>
#include <string>
#include <vector>

#include "hmpn/basis.hpp"
#include "hmpn/closure.hpp"
#include "hmpn/errors.hpp"
#include "hmpn/quadrature.hpp"

namespace hmpn {

/// P_0(mu) .. P_n(mu)
inline std::vector<double> legendre_values(double mu, int n) {
  std::vector<double> P(n + 1);
  P[0] = 1.0;
  if (n >= 1) P[1] = mu;
  for (int l = 1; l < n; ++l) P[l + 1] = ((2 * l + 1) * mu * P[l] - l * P[l - 1]) / (l + 1);
  return P;
}

/// Monomial-variable PN closure: E_{N+1} from the Legendre expansion truncated at degree N.
/// This is the f-recursion at alpha = 0 with f_1 left free.
inline std::vector<double> pn_closure_flux(const MomentState& U) {
  const int N = U.order();
  if (N < 1) throw DomainError("PN order must be at least 1");
  const auto rec = monic_recurrence(0.0, 4, N);
  std::vector<double> f(N + 1, 0.0);
  for (int i = 0; i <= N; ++i) {
    double s = U.E[i];
    for (int j = 0; j < i; ++j) s -= rec.K(i, j) * f[j];
    f[i] = s / rec.K(i, i);
  }
  std::vector<double> F(U.E.begin() + 1, U.E.end());
  double top = 0.0;
  for (int k = 0; k <= N; ++k) top += rec.K(N + 1, k) * f[k];
  F.push_back(top);
  return F;
}

/// Flux of the Legendre system: ((l+1) phi_{l+1} + l phi_{l-1}) / (2l+1), phi_{N+1} = 0.
inline std::vector<double> pn_legendre_flux(const std::vector<double>& phi) {
  const int N = static_cast<int>(phi.size()) - 1;
  std::vector<double> F(N + 1);
  for (int l = 0; l <= N; ++l) {
    const double up = l < N ? (l + 1) * phi[l + 1] : 0.0;
    const double dn = l > 0 ? l * phi[l - 1] : 0.0;
    F[l] = (up + dn) / (2 * l + 1);
  }
  return F;
}

/// Largest characteristic speed of PN: the largest zero of P_{N+1} (any N >= 0).
inline double pn_max_speed(int N) { return gauss_legendre(N + 1).nodes.back(); }

/// I(mu) from Legendre moments.
inline double pn_intensity(const std::vector<double>& phi, double mu) {
  const int N = static_cast<int>(phi.size()) - 1;
  const auto P = legendre_values(mu, N);
  double s = 0.0;
  for (int l = 0; l <= N; ++l) s += 0.5 * (2 * l + 1) * phi[l] * P[l];
  return s;
}

/// Monomial moments E_0..E_K of the truncated Legendre intensity.
inline std::vector<double> legendre_to_monomial(const std::vector<double>& phi, int K) {
  const int N = static_cast<int>(phi.size()) - 1;
  const auto rule = gauss_legendre((N + K) / 2 + 2);
  std::vector<double> E(K + 1, 0.0);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double mu = rule.nodes[q];
    const double v = rule.weights[q] * pn_intensity(phi, mu);
    double p = 1.0;
    for (int k = 0; k <= K; ++k, p *= mu) E[k] += v * p;
  }
  return E;
}

}  // namespace hmpn
