#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace expfem {

// Divided differences of exp over at most 4 abscissae drive every Bernoulli
// evaluation: the mean of exp(sum a_i x_i) over the standard k-simplex equals
// k! * exp[0, a_1, ..., a_k].

/// Divided-difference abscissae for exp, with the max node kept as the shift
/// that makes exp evaluations overflow-safe.
struct ExpNodes {
  std::vector<double> nodes;
  double shift = 0.0;

  explicit ExpNodes(std::span<const double> xs) : nodes(xs.begin(), xs.end()) {
    if (nodes.size() < 1 || nodes.size() > 4)
      throw std::invalid_argument("ExpNodes: supported node counts are 1..4");
    shift = *std::max_element(nodes.begin(), nodes.end());
  }
};

namespace detail {

inline constexpr double kFactorial[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};

// Below this spread a divided-difference block is evaluated by the confluent
// series; above it the Newton recursion is safe for exp.
inline constexpr double kSeriesSpread = 1e-3;

// exp[y_i..y_{i+m}] for clustered ascending nodes, via the complete homogeneous
// symmetric polynomial expansion exp[y] = e^mu * sum_j h_j(y - mu) / (j+m)!.
template <class Real>
Real exp_divdiff_cluster(const Real* y, int m) {
  constexpr int J = 16;
  Real mu = 0;
  for (int p = 0; p <= m; ++p) mu += y[p];
  mu /= Real(m + 1);

  Real h[J + 1] = {Real(1)};
  for (int p = 0; p <= m; ++p) {
    const Real d = y[p] - mu;
    for (int j = 1; j <= J; ++j) h[j] += d * h[j - 1];
  }

  Real sum = 0;
  Real fact = Real(detail::kFactorial[m]);
  for (int j = 0; j <= J; ++j) {
    const Real term = h[j] / fact;
    sum += term;
    fact *= Real(m + 1 + j);
    if (std::abs(term) <= std::numeric_limits<Real>::epsilon() * std::abs(sum) && j >= 2) break;
  }
  return std::exp(mu) * sum;
}

// Newton table on ascending nodes; clustered sub-ranges fall back to the
// series so no small-gap subtraction is ever formed.
template <class Real>
Real exp_divdiff_sorted(const Real* y, int n) {
  Real f[4];
  for (int i = 0; i < n; ++i) f[i] = std::exp(y[i]);
  for (int m = 1; m < n; ++m) {
    for (int i = 0; i + m < n; ++i) {
      const Real span = y[i + m] - y[i];
      if (span < Real(kSeriesSpread) * Real(m))
        f[i] = exp_divdiff_cluster(y + i, m);
      else
        f[i] = (f[i + 1] - f[i]) / span;
    }
  }
  return f[0];
}

}  // namespace detail

/// exp[x_0, ..., x_{n-1}] for 1 <= n <= 4, stable for any node layout.
template <class Real>
Real exp_divided_difference_t(const Real* x, int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("exp_divided_difference: 1..4 nodes");
  Real y[4];
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(double(x[i]))) throw std::domain_error("exp_divided_difference: non-finite node");
    y[i] = x[i];
  }
  std::sort(y, y + n);
  const Real c = y[n - 1];
  for (int i = 0; i < n; ++i) y[i] -= c;
  return std::exp(c) * detail::exp_divdiff_sorted(y, n);
}

inline double exp_divided_difference(std::span<const double> nodes) {
  return exp_divided_difference_t(nodes.data(), int(nodes.size()));
}

inline double exp_divided_difference(const ExpNodes& en) {
  return exp_divided_difference_t(en.nodes.data(), int(en.nodes.size()));
}

/// Mean of exp(a_1 x_1 + ... + a_k x_k) over the standard k-simplex, k <= 3.
/// Equals k! * exp[0, a_1, ..., a_k]; returns 1 for k = 0.
inline double simplex_exp_average(std::span<const double> a) {
  const int k = int(a.size());
  if (k == 0) return 1.0;
  if (k > 3) throw std::invalid_argument("simplex_exp_average: k <= 3");
  double nodes[4] = {0.0};
  for (int i = 0; i < k; ++i) {
    if (!std::isfinite(a[i])) throw std::domain_error("simplex_exp_average: non-finite entry");
    nodes[i + 1] = a[i];
  }
  return detail::kFactorial[k] * exp_divided_difference_t(nodes, k + 1);
}

namespace detail {

// B_k = eps * (mean of E over the k-1 front face) / (mean of E over the
// k-simplex). Shared shift makes the ratio immune to overflow; a clamped
// floor keeps the value strictly positive under deep underflow.
template <class Real, int K>
Real bernoulli_impl(const std::array<Real, 3>& sigma, Real eps) {
  static_assert(K >= 1 && K <= 3);
  if (!(eps > Real(0))) throw std::invalid_argument("bernoulli: eps must be positive");

  Real s[3];
  Real c = 0;
  for (int i = 0; i < K; ++i) {
    if (!std::isfinite(double(sigma[i]))) throw std::domain_error("bernoulli: non-finite sigma");
    s[i] = sigma[i] / eps;
    c = std::max(c, s[i]);
  }

  Real y[4];
  y[0] = -c;
  for (int i = 0; i < K; ++i) y[i + 1] = s[i] - c;

  Real num[4], den[4];
  std::copy(y, y + K, num);
  std::sort(num, num + K);
  std::copy(y, y + K + 1, den);
  std::sort(den, den + K + 1);

  const Real fwd = Real(kFactorial[K - 1]) * exp_divdiff_sorted(num, K);
  const Real vol = Real(kFactorial[K]) * exp_divdiff_sorted(den, K + 1);
  const Real b = eps * fwd / vol;
  return std::max(b, std::numeric_limits<Real>::min());
}

}  // namespace detail

/// B1(sigma) = eps / mean of exp(sigma x / eps) over [0,1].
template <class Real = double>
Real bernoulli1(Real sigma, Real eps) {
  return detail::bernoulli_impl<Real, 1>({sigma, Real(0), Real(0)}, eps);
}

/// B2(sigma1, sigma2): 1-simplex over 2-simplex exponential means, scaled by eps.
template <class Real = double>
Real bernoulli2(Real sigma1, Real sigma2, Real eps) {
  return detail::bernoulli_impl<Real, 2>({sigma1, sigma2, Real(0)}, eps);
}

/// B3(sigma1, sigma2, sigma3): 2-simplex over 3-simplex exponential means,
/// scaled by eps; symmetric in the first two arguments.
template <class Real = double>
Real bernoulli3(Real sigma1, Real sigma2, Real sigma3, Real eps) {
  return detail::bernoulli_impl<Real, 3>({sigma1, sigma2, sigma3}, eps);
}

/// Default Bernoulli evaluations used by the pointwise spline systems.
struct StdBernoulli {
  template <class Real>
  static Real b1(Real s, Real eps) { return bernoulli1<Real>(s, eps); }
  template <class Real>
  static Real b2(Real s1, Real s2, Real eps) { return bernoulli2<Real>(s1, s2, eps); }
  template <class Real>
  static Real b3(Real s1, Real s2, Real s3, Real eps) { return bernoulli3<Real>(s1, s2, s3, eps); }
};

}  // namespace expfem
