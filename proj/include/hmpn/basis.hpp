#pragma once

// Alpha-parametric orthogonal polynomial machinery for the weights
//   omega(mu)  = (1 + alpha mu)^-4   (ansatz weight)
//   omega~(mu) = (1 + alpha mu)^-5   (regularization weight)
// together with the (1 + alpha mu)^-6 weight needed for alpha-derivatives.

#include <Eigen/Eigenvalues>

#include <array>
#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hmpn/errors.hpp"
#include "hmpn/quadrature.hpp"

namespace hmpn {

/// Largest |alpha| admitted by the closure.
inline constexpr double kAlphaLimit = 1.0 - 1e-10;
/// Highest moment order the weighted rule integrates to full precision.
inline constexpr int kMaxOrder = 16;

namespace detail {

inline constexpr int kRuleNodes = 48;
inline constexpr double kLogMapThreshold = 0.5;
inline constexpr double kSeriesThreshold = 0.1;

inline const QuadratureRule& reference_rule() {
  static const QuadratureRule rule = gauss_legendre(kRuleNodes);
  return rule;
}

inline void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || std::abs(alpha) >= 1.0)
    throw DomainError("alpha must lie in (-1, 1), got " + std::to_string(alpha));
}

inline void check_order_m(int m) {
  if (m != 4 && m != 5)
    throw DomainError("weight exponent must be 4 or 5, got " + std::to_string(m));
}

}  // namespace detail

/// Discrete measure for  g -> int_{mu_a}^{mu_b} g(mu) (1 + alpha mu)^-m dmu,  m = 4, 5, 6.
///
/// For |alpha| >= 0.5 the nodes are Gauss-Legendre points in u = ln(1 + alpha mu); the
/// integrand is entire in u, so the rule stays accurate up to |alpha| = 1 - 1e-10 where the
/// weight is sharply peaked at one end of the interval.
struct WeightRule {
  double alpha = 0.0;
  std::vector<double> mu;
  std::array<std::vector<double>, 3> w;

  const std::vector<double>& weights(int m) const { return w.at(m - 4); }
  std::size_t size() const { return mu.size(); }
};

inline WeightRule make_weight_rule(double alpha, double mu_a = -1.0, double mu_b = 1.0) {
  detail::check_alpha(alpha);
  const auto& ref = detail::reference_rule();
  const std::size_t n = ref.nodes.size();
  WeightRule rule;
  rule.alpha = alpha;
  rule.mu.resize(n);
  for (auto& w : rule.w) w.resize(n);

  if (std::abs(alpha) < detail::kLogMapThreshold) {
    const double mid = 0.5 * (mu_a + mu_b), half = 0.5 * (mu_b - mu_a);
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = mid + half * ref.nodes[i];
      const double inv_t = 1.0 / (1.0 + alpha * mu);
      const double inv_t2 = inv_t * inv_t;
      rule.mu[i] = mu;
      rule.w[0][i] = half * ref.weights[i] * inv_t2 * inv_t2;
      rule.w[1][i] = rule.w[0][i] * inv_t;
      rule.w[2][i] = rule.w[1][i] * inv_t;
    }
  } else {
    const double ua = std::log1p(alpha * mu_a), ub = std::log1p(alpha * mu_b);
    const double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = mid + half * ref.nodes[i];
      const double inv_t = std::exp(-u);
      rule.mu[i] = std::expm1(u) / alpha;
      // dmu = e^u du / alpha, weight e^{-m u}
      rule.w[0][i] = ref.weights[i] * half / alpha * inv_t * inv_t * inv_t;
      rule.w[1][i] = rule.w[0][i] * inv_t;
      rule.w[2][i] = rule.w[1][i] * inv_t;
    }
  }
  return rule;
}

// ---------------------------------------------------------------------------------------------
// Weight moments

struct WeightMoments {
  double alpha = 0.0;
  int order_m = 4;
  std::vector<double> values;  ///< m_j = int mu^j (1 + alpha mu)^-m dmu, j = 0..j_max
  std::vector<double> derivs;  ///< d m_j / d alpha
};

namespace detail {

/// Taylor series in alpha through order 20; every retained term of a given m_j has one sign.
inline std::vector<double> series_moments(double alpha, int m, int j_max) {
  constexpr int kOrder = 20;
  std::vector<double> out(j_max + 1, 0.0);
  for (int j = 0; j <= j_max; ++j) {
    double sum = 0.0, tail = 0.0, binom = 1.0, power = 1.0;
    for (int n = 0; n <= kOrder + 2; ++n) {
      if (n > 0) {
        binom *= static_cast<double>(n + m - 1) / n;
        power *= -alpha;
      }
      if ((n + j) % 2 != 0) continue;
      const double term = binom * power * 2.0 / (j + n + 1);
      if (n <= kOrder)
        sum += term;
      else
        tail = std::max(tail, std::abs(term));
    }
    if (tail > 1e-13 * std::abs(sum))
      throw AccuracyError("weight moment series remainder too large at alpha=" +
                          std::to_string(alpha));
    out[j] = sum;
  }
  return out;
}

inline std::vector<double> rule_moments(const WeightRule& rule, int m, int j_max) {
  const auto& w = rule.weights(m);
  std::vector<double> out(j_max + 1, 0.0);
  std::vector<double> pw(w.begin(), w.end());
  for (int j = 0; j <= j_max; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < pw.size(); ++i) {
      s += pw[i];
      pw[i] *= rule.mu[i];
    }
    out[j] = s;
  }
  return out;
}

inline double closed_form_m0(double alpha, int m) {
  return (std::pow(1.0 - alpha, 1.0 - m) - std::pow(1.0 + alpha, 1.0 - m)) / ((m - 1) * alpha);
}

inline std::vector<double> moments_for(double alpha, int m, int j_max, const WeightRule* rule) {
  if (std::abs(alpha) < kSeriesThreshold) return series_moments(alpha, m, j_max);
  auto values = rule_moments(*rule, m, j_max);
  const double m0 = closed_form_m0(alpha, m);
  if (std::abs(values[0] - m0) > 1e-10 * std::abs(m0))
    throw AccuracyError("weight moment quadrature disagrees with closed form at alpha=" +
                        std::to_string(alpha));
  return values;
}

}  // namespace detail

/// Moments of (1 + alpha mu)^-m, m in {4, 5}, and their alpha-derivatives
/// d m_j^(m) / d alpha = -m m_{j+1}^(m+1).
inline WeightMoments weight_moments(double alpha, int order_m, int j_max) {
  detail::check_alpha(alpha);
  detail::check_order_m(order_m);
  if (j_max < 1) throw DomainError("j_max must be at least 1");
  WeightRule rule;
  if (std::abs(alpha) >= detail::kSeriesThreshold) rule = make_weight_rule(alpha);
  WeightMoments out;
  out.alpha = alpha;
  out.order_m = order_m;
  out.values = detail::moments_for(alpha, order_m, j_max, &rule);
  const auto next = detail::moments_for(alpha, order_m + 1, j_max + 1, &rule);
  out.derivs.resize(j_max + 1);
  for (int j = 0; j <= j_max; ++j) out.derivs[j] = -order_m * next[j + 1];
  return out;
}

// ---------------------------------------------------------------------------------------------
// Monic orthogonal polynomials

/// Monic polynomials orthogonal under (1 + alpha mu)^-m, tabulated at the nodes of a
/// WeightRule by the discretized Stieltjes procedure:
///   p_{k+1} = (mu - a_k) p_k - b_k p_{k-1},   b_k = K_kk / K_{k-1,k-1}.
class MonicFamily {
 public:
  MonicFamily() = default;

  MonicFamily(const WeightRule& rule, int order_m, int degree)
      : alpha_(rule.alpha), order_m_(order_m), degree_(degree), n_(rule.size()) {
    detail::check_order_m(order_m);
    const auto& w = rule.weights(order_m);
    const auto& w_next = rule.weights(order_m + 1);
    mu_ = rule.mu;
    weights_ = w;
    values_.assign((degree + 1) * n_, 0.0);
    a_.assign(degree + 1, 0.0);
    b_.assign(degree + 1, 0.0);
    norm_.assign(degree + 1, 0.0);
    dnorm_.assign(degree + 1, 0.0);

    for (std::size_t i = 0; i < n_; ++i) values_[i] = 1.0;
    for (int k = 0; k <= degree; ++k) {
      const double* p = values_.data() + k * n_;
      double norm = 0.0, first = 0.0, shifted = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double pp = p[i] * p[i];
        norm += w[i] * pp;
        first += w[i] * mu_[i] * pp;
        shifted += w_next[i] * mu_[i] * pp;
      }
      if (!(norm > 0.0) || !std::isfinite(norm))
        throw RealizabilityError("orthogonal polynomial norm K_kk <= 0 at degree " +
                                     std::to_string(k),
                                 k);
      norm_[k] = norm;
      a_[k] = first / norm;
      b_[k] = k > 0 ? norm / norm_[k - 1] : 0.0;
      // the alpha-derivative of p_k has lower degree, so only the weight is differentiated
      dnorm_[k] = -order_m * shifted;
      if (k < degree) {
        double* next = values_.data() + (k + 1) * n_;
        const double* prev = k > 0 ? values_.data() + (k - 1) * n_ : nullptr;
        for (std::size_t i = 0; i < n_; ++i)
          next[i] = (mu_[i] - a_[k]) * p[i] - (prev ? b_[k] * prev[i] : 0.0);
      }
    }
  }

  double alpha() const { return alpha_; }
  int order_m() const { return order_m_; }
  int degree() const { return degree_; }
  double a(int k) const { return a_[k]; }
  double b(int k) const { return b_[k]; }
  double norm(int k) const { return norm_[k]; }
  double norm_deriv(int k) const { return dnorm_[k]; }

  std::span<const double> nodes() const { return mu_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> values(int k) const { return {values_.data() + k * n_, n_}; }

  /// p_k(mu) by the three-term recurrence.
  double eval(double mu, int k) const {
    double prev = 0.0, cur = 1.0;
    for (int j = 0; j < k; ++j) {
      const double next = (mu - a_[j]) * cur - b_[j] * prev;
      prev = cur;
      cur = next;
    }
    return cur;
  }

  /// p_k(mu) (1 + alpha mu)^-m
  double eval_weighted(double mu, int k) const {
    return eval(mu, k) * std::pow(1.0 + alpha_ * mu, -order_m_);
  }

 private:
  double alpha_ = 0.0;
  int order_m_ = 4;
  int degree_ = 0;
  std::size_t n_ = 0;
  std::vector<double> mu_, weights_, values_;
  std::vector<double> a_, b_, norm_, dnorm_;
};

/// K_{j,k} = int mu^j p_k weight dmu for 0 <= k <= j < rows; zero above the diagonal.
inline std::vector<std::vector<double>> mixed_table(const MonicFamily& fam, int rows) {
  const auto mu = fam.nodes();
  const auto w = fam.weights();
  std::vector<double> pw(w.begin(), w.end());
  std::vector<std::vector<double>> table(rows);
  for (int j = 0; j < rows; ++j) {
    table[j].assign(j + 1, 0.0);
    for (int k = 0; k <= std::min(j, fam.degree()); ++k) {
      if (k == j) {
        table[j][k] = fam.norm(k);
        continue;
      }
      const auto p = fam.values(k);
      double s = 0.0;
      for (std::size_t i = 0; i < pw.size(); ++i) s += pw[i] * p[i];
      table[j][k] = s;
    }
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] *= mu[i];
  }
  return table;
}

struct MonicRecurrence {
  double alpha = 0.0;
  int order_m = 4;
  int order = 0;                   ///< closure order N; tables run through degree N+1
  std::vector<double> a, b;        ///< recurrence shifts and couplings, index 0..N+1 (b_0 = 0)
  std::vector<double> norms;       ///< K_kk
  std::vector<double> norms_deriv; ///< dK_kk / dalpha
  std::vector<std::vector<double>> mixed;  ///< K_{j,k}, 0 <= k <= j <= N+1

  double K(int j, int k) const { return k > j ? 0.0 : mixed[j][k]; }
};

inline MonicRecurrence monic_recurrence(double alpha, int order_m, int N) {
  if (N < 0 || N > kMaxOrder) throw DomainError("order out of range: " + std::to_string(N));
  const MonicFamily fam(make_weight_rule(alpha), order_m, N + 1);
  MonicRecurrence rec;
  rec.alpha = alpha;
  rec.order_m = order_m;
  rec.order = N;
  for (int k = 0; k <= N + 1; ++k) {
    rec.a.push_back(fam.a(k));
    rec.b.push_back(fam.b(k));
    rec.norms.push_back(fam.norm(k));
    rec.norms_deriv.push_back(fam.norm_deriv(k));
  }
  rec.mixed = mixed_table(fam, N + 2);
  return rec;
}

/// Same tables, keyed by a moment set; the moments must reach degree 2N+2.
inline MonicRecurrence monic_recurrence(const WeightMoments& moments, int N) {
  if (static_cast<int>(moments.values.size()) < 2 * N + 3)
    throw DomainError("weight moments do not reach degree 2N+2");
  return monic_recurrence(moments.alpha, moments.order_m, N);
}

/// p_k(mu) from a recurrence table.
inline double eval_basis(const MonicRecurrence& rec, double mu, int k) {
  double prev = 0.0, cur = 1.0;
  for (int j = 0; j < k; ++j) {
    const double next = (mu - rec.a[j]) * cur - rec.b[j] * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// P_k(mu) = p_k(mu) (1 + alpha mu)^-m
inline double eval_weighted_basis(const MonicRecurrence& rec, double mu, int k) {
  return eval_basis(rec, mu, k) * std::pow(1.0 + rec.alpha * mu, -rec.order_m);
}

// ---------------------------------------------------------------------------------------------
// Speeds and coupling coefficients

/// Zeros of p_size, ascending: eigenvalues of the symmetrized Jacobi matrix of the family.
inline std::vector<double> jacobi_eigenvalues(const MonicFamily& fam, int size) {
  Eigen::VectorXd diag(size), sub(std::max(size - 1, 0));
  for (int k = 0; k < size; ++k) diag[k] = fam.a(k);
  for (int k = 1; k < size; ++k) sub[k - 1] = std::sqrt(fam.b(k));
  if (size == 1) return {diag[0]};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Characteristic speeds of the regularized order-N system: the N+1 zeros of p~_{N+1}.
inline std::vector<double> characteristic_speeds(double alpha, int N) {
  if (N < 1 || N > kMaxOrder) throw DomainError("order out of range: " + std::to_string(N));
  const MonicFamily tilde(make_weight_rule(alpha), 5, N);
  return jacobi_eigenvalues(tilde, N + 1);
}

struct CouplingCoeffs {
  std::vector<double> beta;   ///< K_kk / K~_kk
  std::vector<double> gamma;  ///< (dK_kk / dalpha) / K~_kk
};

inline CouplingCoeffs coupling_from(const MonicFamily& p, const MonicFamily& pt, int N) {
  CouplingCoeffs c;
  for (int k = 0; k <= N; ++k) {
    c.beta.push_back(p.norm(k) / pt.norm(k));
    c.gamma.push_back(p.norm_deriv(k) / pt.norm(k));
  }
  return c;
}

/// Coefficients of  P_k = alpha P~_{k+1} + beta_k P~_k  and  dP_k/dalpha = -4 P~_{k+1} + gamma_k P~_k.
inline CouplingCoeffs coupling_coefficients(double alpha, int N) {
  if (N < 0 || N > kMaxOrder) throw DomainError("order out of range: " + std::to_string(N));
  const auto rule = make_weight_rule(alpha);
  return coupling_from(MonicFamily(rule, 4, N), MonicFamily(rule, 5, N), N);
}

/// All alpha-dependent tables an order-N closure needs, on one shared node set.
struct BasisTables {
  int order = 0;
  double alpha = 0.0;
  MonicFamily p;   ///< omega-orthogonal, degrees 0..N+1
  MonicFamily pt;  ///< omega~-orthogonal, degrees 0..N+1
  std::vector<std::vector<double>> mixed;  ///< K_{j,k} under omega, rows 0..N+1
  CouplingCoeffs coupling;

  double K(int j, int k) const { return k > j ? 0.0 : mixed[j][k]; }
  double Kt(int k) const { return pt.norm(k); }
};

inline BasisTables make_basis_tables(double alpha, int N) {
  if (N < 1 || N > kMaxOrder) throw DomainError("order out of range: " + std::to_string(N));
  const auto rule = make_weight_rule(alpha);
  BasisTables t;
  t.order = N;
  t.alpha = alpha;
  t.p = MonicFamily(rule, 4, N + 1);
  t.pt = MonicFamily(rule, 5, N + 1);
  t.mixed = mixed_table(t.p, N + 2);
  t.coupling = coupling_from(t.p, t.pt, N);
  return t;
}

/// K~_{N+1,N+1}(alpha), the factor of the regularization term.
inline double regularization_norm(double alpha, int N) {
  const MonicFamily tilde(make_weight_rule(alpha), 5, N + 1);
  return tilde.norm(N + 1);
}

}  // namespace hmpn
