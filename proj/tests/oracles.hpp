#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library, so agreement is evidence rather than self-consistency.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Composite Simpson on [a, b] with m (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Integral of f over {t_1..t_n >= 0, sum t = 1} against dt_1..dt_{n-1},
/// by nested Simpson in the remaining-mass parametrization.
inline double simplex_integral(const std::function<double(const std::vector<double>&)>& f, int n, int m) {
  std::vector<double> t(n);
  std::function<double(int, double)> level = [&](int k, double rest) -> double {
    if (k == n - 1) {
      t[k] = rest;
      return f(t);
    }
    return simpson([&](double v) {
      t[k] = v;
      return level(k + 1, rest - v);
    }, 0.0, rest, m);
  };
  return level(0, 1.0);
}

/// Subentropy through the Hermite-Genocchi representation of the divided
/// difference of x^n ln x: Q = -n E[u ln u] - (H_n - 1) with u = sum t_j l_j
/// and t uniform on the simplex. Smooth in the eigenvalues, so degenerate
/// spectra need no special care.
inline double subentropy_hermite_genocchi(const std::vector<double>& lambda, int panels = 120) {
  const int n = static_cast<int>(lambda.size());
  auto f = [&](const std::vector<double>& t) {
    double u = 0.0;
    for (int j = 0; j < n; ++j) u += t[j] * lambda[j];
    return u > 0.0 ? u * std::log(u) : 0.0;
  };
  const double mean = factorial(n - 1) * simplex_integral(f, n, panels);
  double harmonic = 0.0;
  for (int k = 1; k <= n; ++k) harmonic += 1.0 / k;
  return -n * mean - (harmonic - 1.0);
}

inline double entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) if (v > 0.0) s -= v * std::log(v);
  return s;
}

/// Random point of the open simplex (normalized exponentials).
inline std::vector<double> random_simplex(std::mt19937_64& rng, int n, double floor = 1e-3) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double s = 0.0;
  for (double& v : x) s += (v = e(rng) + floor);
  for (double& v : x) v /= s;
  return x;
}

/// Unweighted two-sided Kolmogorov-Smirnov distance against a CDF.
template <class Cdf>
double ks_distance(std::vector<double> values, Cdf&& cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace oracle
