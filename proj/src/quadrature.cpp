#include "scrooge/quadrature.hpp"

#include <boost/random/sobol.hpp>
#include <map>
#include <mutex>

#include "scrooge/core.hpp"

namespace scrooge {

namespace {

GaussLegendreRule build_rule(std::size_t n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    long double z = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p1 = 1.0L, p2 = 0.0L;
      for (std::size_t j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j - 1.0L) * z * p2 - (j - 1.0L) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      const long double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - z * z) * pp * pp);
    rule.nodes[i] = static_cast<double>(-z);
    rule.nodes[n - 1 - i] = static_cast<double>(z);
    rule.weights[i] = static_cast<double>(w);
    rule.weights[n - 1 - i] = static_cast<double>(w);
  }
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(std::size_t n) {
  if (n == 0) fail(Errc::InvalidArgument, "Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendreRule>(build_rule(n));
  return *slot;
}

namespace simplex_chart {

double to_simplex(std::span<const double> theta, std::span<double> x) {
  double r = 1.0;
  double jac = 1.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double s = std::sin(theta[k]), c = std::cos(theta[k]);
    x[k] = r * s * s;
    jac *= 2.0 * r * s * c;
    r *= c * c;
  }
  x[theta.size()] = r;
  return jac;
}

void to_angles(std::span<const double> x, std::span<double> theta) {
  double r = 1.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    if (r <= 0.0) {
      theta[k] = 0.0;
      continue;
    }
    theta[k] = std::asin(std::sqrt(std::clamp(x[k] / r, 0.0, 1.0)));
    r = std::max(0.0, r - x[k]);
  }
}

}  // namespace simplex_chart

double integrate_simplex_fixed(const SimplexIntegrand& f, std::size_t n, std::size_t nodes) {
  if (n < 2) fail(Errc::DimensionTooSmall, "simplex integration needs n >= 2");
  const std::size_t dims = n - 1;
  const auto& rule = gauss_legendre(nodes);
  const double half = 0.5 * simplex_chart::kHalfPi;
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> theta(dims), x(n);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      theta[d] = half * (1.0 + rule.nodes[idx[d]]);
      w *= half * rule.weights[idx[d]];
    }
    const double jac = simplex_chart::to_simplex(theta, x);
    total += w * jac * f(x);
    std::size_t d = 0;
    while (d < dims && ++idx[d] == nodes) idx[d++] = 0;
    if (d == dims) break;
  }
  return total;
}

double integrate_simplex(const SimplexIntegrand& f, std::size_t n, double rel_tol,
                         std::size_t start_nodes, std::size_t max_nodes) {
  std::size_t nodes = start_nodes;
  double prev = integrate_simplex_fixed(f, n, nodes);
  while (nodes < max_nodes) {
    nodes *= 2;
    const double cur = integrate_simplex_fixed(f, n, nodes);
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  fail(Errc::QuadratureFailure, "simplex quadrature did not converge");
}

struct ShiftedSobol::Impl {
  explicit Impl(std::size_t dim) : engine(static_cast<unsigned>(dim)) {}
  boost::random::sobol engine;
};

ShiftedSobol::ShiftedSobol(std::size_t dim, std::span<const double> shift)
    : dim_(dim), shift_(shift.begin(), shift.end()), impl_(std::make_unique<Impl>(dim)) {
  if (shift_.size() != dim_) fail(Errc::DimensionMismatch, "Sobol shift has wrong dimension");
}
ShiftedSobol::ShiftedSobol(ShiftedSobol&&) noexcept = default;
ShiftedSobol& ShiftedSobol::operator=(ShiftedSobol&&) noexcept = default;
ShiftedSobol::~ShiftedSobol() = default;

void ShiftedSobol::next(std::span<double> out) {
  for (std::size_t d = 0; d < dim_; ++d) {
    double u = static_cast<double>(impl_->engine()) * 0x1.0p-64 + shift_[d];
    u -= std::floor(u);
    out[d] = std::clamp(u, 0x1.0p-60, 1.0 - 0x1.0p-53);
  }
}

double integrate_simplex_qmc(const SimplexIntegrand& f, std::size_t n, std::size_t points,
                             std::uint64_t shift_seed) {
  if (n < 2) fail(Errc::DimensionTooSmall, "simplex integration needs n >= 2");
  const std::size_t dims = n - 1;
  Rng rng = make_rng({shift_seed, 0});
  std::vector<double> shift(dims);
  for (double& s : shift) s = uniform_open(rng);
  ShiftedSobol sobol(dims, shift);
  std::vector<double> u(dims), theta(dims), x(n);
  const double cube = std::pow(simplex_chart::kHalfPi, static_cast<double>(dims));
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    sobol.next(u);
    for (std::size_t d = 0; d < dims; ++d) theta[d] = simplex_chart::kHalfPi * u[d];
    const double jac = simplex_chart::to_simplex(theta, x);
    total += jac * f(x);
  }
  return cube * total / static_cast<double>(points);
}

}  // namespace scrooge
