#pragma once

// Benchmark problems and their exact solutions.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hmpn/errors.hpp"
#include "hmpn/quadrature.hpp"
#include "hmpn/solver.hpp"

namespace hmpn {

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"riemann",  "continuous_beam", "two_beam",
                                                 "gaussian", "su_olson",        "antidiffusive"};
  return names;
}

/// Optional replacements for problem parameters; unset fields keep the problem default.
struct ProblemOverrides {
  std::optional<double> t_end;
  std::optional<double> a;
  std::optional<double> c;

  static ProblemOverrides end_time(double t) {
    ProblemOverrides o;
    o.t_end = t;
    return o;
  }
};

namespace detail {

inline const QuadratureRule& gl128() {
  static const QuadratureRule rule = gauss_legendre(128);
  return rule;
}

/// Integral of g over [lo, hi] with the 128-node rule.
template <class G>
double gl128_integral(G&& g, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const auto& r = gl128();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t q = 0; q < r.nodes.size(); ++q) s += r.weights[q] * g(mid + half * r.nodes[q]);
  return half * s;
}

inline double riemann_profile(double mu) {
  const double d = 1.0 - 0.08 * mu - 0.85 * mu * mu;
  return 1.0 / (d * d * d * d);
}

/// 5 - 10z on [-0.1, 0.1], clamped to 6 and 4 outside.
inline double continuous_profile(double z) {
  if (z <= -0.1) return 6.0;
  if (z > 0.1) return 4.0;
  return 5.0 - 10.0 * z;
}

}  // namespace detail

/// w0 with int I_0 dmu = a c.
inline double riemann_w0() {
  static const double w0 = 1.0 / detail::gl128_integral(detail::riemann_profile, -1.0, 1.0);
  return w0;
}

/// I_0(mu) / (a c) of the Riemann problem.
inline double riemann_base_intensity(double mu) { return riemann_w0() * detail::riemann_profile(mu); }

/// The base distribution of the Riemann problem as a 128-node measure, total mass `mass`.
inline DirectionalMeasure riemann_measure(double mass) {
  const auto& r = detail::gl128();
  DirectionalMeasure m;
  m.mu = r.nodes;
  for (std::size_t q = 0; q < r.nodes.size(); ++q)
    m.w.push_back(mass * r.weights[q] * riemann_base_intensity(r.nodes[q]));
  return m;
}

struct AntidiffusiveParams {
  double a = 0.275;
  double b = 0.1;
  double z0 = 0.1;
};

/// Exact steady intensity of the three-slab problem (mu != 0).
inline double antidiffusive_exact(double z, double mu, const AntidiffusiveParams& p = {}) {
  if (mu == 0.0) throw DomainError("antidiffusive_exact needs mu != 0");
  const double a = p.a, b = p.b, z0 = p.z0;
  auto inner = [&](double zz) {
    if (mu > 0.0) {
      const double x = std::exp(-zz / mu);
      return a * x + (1.0 - x);
    }
    const double x = std::exp(-(z0 - zz) / std::abs(mu));
    return b * x + (1.0 - x);
  };
  if (z >= 0.0 && z <= z0) return inner(z);
  if (z < 0.0) {
    if (mu > 0.0) return a;
    const double x = std::exp(z / std::abs(mu));
    return inner(0.0) * x + a * (1.0 - x);
  }
  if (mu < 0.0) return b;
  const double x = std::exp(-(z - z0) / mu);
  return inner(z0) * x + b * (1.0 - x);
}

/// E_k of the exact solution by 128-node quadrature on each half range, k = 0..K.
inline std::vector<double> antidiffusive_exact_moments(double z, int K,
                                                       const AntidiffusiveParams& p = {}) {
  std::vector<double> E(K + 1, 0.0);
  const auto& r = detail::gl128();
  for (double lo : {-1.0, 0.0}) {
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double mu = lo + 0.5 + 0.5 * r.nodes[q];
      double v = 0.5 * r.weights[q] * antidiffusive_exact(z, mu, p);
      for (int k = 0; k <= K; ++k, v *= mu) E[k] += v;
    }
  }
  return E;
}

/// E_k(z, t) of free transport from the Riemann data (2 I_0 left of 0, I_0 right), in units of
/// a c. Characteristics with mu >= z/(ct) started on the left.
inline double riemann_free_stream_exact(double z, double t, int k, double ac = 1.0) {
  if (t < 0.0) throw DomainError("time must be non-negative");
  auto g = [k](double mu) { return std::pow(mu, k) * riemann_base_intensity(mu); };
  double split;
  if (t == 0.0)
    split = z <= 0.0 ? -1.0 : 1.0;
  else
    split = std::clamp(z / t, -1.0, 1.0);
  return ac * (detail::gl128_integral(g, -1.0, split) + 2.0 * detail::gl128_integral(g, split, 1.0));
}

/// E_k(z, t) of free transport from the continuous-beam data (point masses at mu = 0 and 1).
inline double continuous_beam_exact(double z, double t, int k, double ac = 1.0) {
  const double still = k == 0 ? 0.05 * detail::continuous_profile(z) : 0.0;
  return ac * (still + 0.45 * detail::continuous_profile(z - t));
}

inline Problem make_problem(const std::string& name, const ProblemOverrides& ov = {}) {
  Problem p;
  p.name = name;
  const double a = ov.a.value_or(1.0);
  const double c = ov.c.value_or(1.0);
  const double ac = a * c;
  p.material.a = a;
  p.material.c = c;
  p.material.energy = EnergyLaw::radiation(a);

  if (name == "riemann") {
    p.z_left = -0.5;
    p.z_right = 0.5;
    p.t_end = 0.1;
    p.initial_intensity = [ac](double z) { return riemann_measure(z <= 0.0 ? 2.0 * ac : ac); };
  } else if (name == "continuous_beam") {
    p.z_left = -0.5;
    p.z_right = 0.5;
    p.t_end = 0.1;
    p.initial_intensity = [ac](double z) {
      const double s = 0.5 * ac * detail::continuous_profile(z);
      return DirectionalMeasure{{0.0, 1.0}, {0.1 * s, 0.9 * s}};
    };
  } else if (name == "two_beam") {
    p.z_left = 0.0;
    p.z_right = 1.0;
    p.steady_state = true;
    p.material.sigma_a = [](double, double) { return 2.0; };
    p.initial_intensity = [ac](double) { return DirectionalMeasure::isotropic(1e-8 * ac); };
    p.bc_left = p.bc_right = BoundaryCondition::inflow_isotropic(0.5 * ac);
  } else if (name == "gaussian") {
    p.t_end = 1.0;
    p.material.sigma_s = [](double, double) { return 1.0; };
    p.initial_intensity = [ac](double z) {
      const double theta = 0.01;
      return DirectionalMeasure::isotropic(ac / std::sqrt(2.0 * std::numbers::pi * theta) *
                                           std::exp(-z * z / (2.0 * theta)));
    };
    p.bc_left = p.bc_right = BoundaryCondition::vacuum();
  } else if (name == "su_olson") {
    p.z_left = 0.0;
    p.z_right = 30.0;
    p.t_end = 10.0;
    p.material.coupling = Coupling::energy;
    p.material.sigma_a = [](double, double) { return 1.0; };
    p.material.source = [ac](double z) { return z >= 0.0 && z <= 0.5 ? ac : 0.0; };
    // cold start: E0 = 1e-8 a c in equilibrium with T^4 = 1e-8
    p.initial_intensity = [ac](double) { return DirectionalMeasure::isotropic(0.5e-8 * ac); };
    p.initial_temperature = [](double) { return 1e-2; };
    p.bc_left = BoundaryCondition::reflective();
    p.bc_right = BoundaryCondition::vacuum();
  } else if (name == "antidiffusive") {
    const AntidiffusiveParams q;
    p.z_left = -2.0;
    p.z_right = 2.1;
    p.steady_state = true;
    p.material.coupling = Coupling::fixed_temperature;
    p.material.sigma_a = [](double, double) { return 1.0; };
    // T^4 scaled so that the equilibrium intensity a c T^4 / 2 equals the slab values
    p.material.temperature = [q, ac](double z) {
      const double level = z < 0.0 ? q.a : (z <= q.z0 ? 1.0 : q.b);
      return std::pow(2.0 * level / ac, 0.25);
    };
    p.initial_intensity = [q](double z) {
      return DirectionalMeasure::isotropic(z < 0.0 ? q.a : (z <= q.z0 ? 1.0 : q.b));
    };
    p.bc_left = BoundaryCondition::inflow_isotropic(q.a);
    p.bc_right = BoundaryCondition::inflow_isotropic(q.b);
  } else {
    throw UnknownProblem("unknown problem: " + name);
  }
  if (name == "gaussian" && ov.t_end) p.t_end = *ov.t_end;
  if (name == "gaussian") {
    p.z_left = -(p.t_end + 1.0);
    p.z_right = p.t_end + 1.0;
  } else if (ov.t_end) {
    p.t_end = *ov.t_end;
  }
  return p;
}

/// Default cell count used by the desk-scale runs.
inline int default_cells(const std::string& name) {
  if (name == "antidiffusive") return 820;  // dz = 1/200 on [-2, 2.1]
  if (name == "su_olson") return 2000;
  return 1000;
}

}  // namespace hmpn
