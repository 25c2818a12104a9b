#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "scrooge/error.hpp"

namespace scrooge {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached, thread-safe.
const GaussLegendreRule& gauss_legendre(std::size_t n);

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double integrate_fixed(F&& f, double a, double b, std::size_t nodes) {
  const auto& rule = gauss_legendre(nodes);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

struct QuadratureOptions {
  std::size_t start_nodes = 128;
  std::size_t max_nodes = 8192;
  double rel_tol = 1e-10;
};

/// Doubles the node count until successive estimates agree to rel_tol.
/// Throws QuadratureFailure when max_nodes is reached first.
template <class F>
double integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
  std::size_t n = opt.start_nodes;
  double prev = integrate_fixed(f, a, b, n);
  while (n < opt.max_nodes) {
    n *= 2;
    const double cur = integrate_fixed(f, a, b, n);
    if (std::abs(cur - prev) <= opt.rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  fail(Errc::QuadratureFailure, "Gauss-Legendre doubling did not converge");
}

/// Integral of f over [a, b] within [0, 1] after x = sin^2(theta), which
/// regularizes 1/sqrt(x(1-x)) endpoint behaviour.
template <class F>
double integrate_arcsine(F&& f, double a, double b, QuadratureOptions opt = {}) {
  const double ta = std::asin(std::sqrt(std::clamp(a, 0.0, 1.0)));
  const double tb = std::asin(std::sqrt(std::clamp(b, 0.0, 1.0)));
  auto g = [&](double t) {
    const double s = std::sin(t), c = std::cos(t);
    return f(s * s) * 2.0 * s * c;
  };
  return integrate(g, ta, tb, opt);
}

template <class F>
double integrate_arcsine_fixed(F&& f, double a, double b, std::size_t nodes) {
  const double ta = std::asin(std::sqrt(std::clamp(a, 0.0, 1.0)));
  const double tb = std::asin(std::sqrt(std::clamp(b, 0.0, 1.0)));
  auto g = [&](double t) {
    const double s = std::sin(t), c = std::cos(t);
    return f(s * s) * 2.0 * s * c;
  };
  return integrate_fixed(g, ta, tb, nodes);
}

/// Chart of the (n-1)-simplex by angles theta in [0, pi/2]^(n-1):
///   x_k = r_k sin^2(theta_k),  r_{k+1} = r_k cos^2(theta_k),  x_n = r_n.
/// Densities with 1/sqrt(x_j) face behaviour become bounded in this chart.
namespace simplex_chart {

inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Writes x (size n = theta.size() + 1) and returns |dx_1..dx_{n-1} / dtheta|.
double to_simplex(std::span<const double> theta, std::span<double> x);

/// Inverse chart; faces map to the cube boundary.
void to_angles(std::span<const double> x, std::span<double> theta);

}  // namespace simplex_chart

using SimplexIntegrand = std::function<double(std::span<const double>)>;

/// Tensor Gauss-Legendre over the angle chart with `nodes` per axis.
double integrate_simplex_fixed(const SimplexIntegrand& f, std::size_t n, std::size_t nodes);

/// Node doubling (per axis) until rel_tol; for n <= 4 in practice.
double integrate_simplex(const SimplexIntegrand& f, std::size_t n, double rel_tol = 1e-8,
                         std::size_t start_nodes = 16, std::size_t max_nodes = 512);

/// Randomly shifted Sobol quasi-Monte Carlo over the angle chart.
double integrate_simplex_qmc(const SimplexIntegrand& f, std::size_t n, std::size_t points,
                             std::uint64_t shift_seed);

/// Sobol points with a Cranley-Patterson shift, strictly inside (0,1)^dim.
class ShiftedSobol {
 public:
  ShiftedSobol(std::size_t dim, std::span<const double> shift);
  ShiftedSobol(ShiftedSobol&&) noexcept;
  ShiftedSobol& operator=(ShiftedSobol&&) noexcept;
  ~ShiftedSobol();

  std::size_t dimension() const noexcept { return dim_; }
  void next(std::span<double> out);

 private:
  struct Impl;
  std::size_t dim_;
  std::vector<double> shift_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scrooge
