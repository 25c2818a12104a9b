#include "scrooge/coinchannel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "scrooge/densities.hpp"
#include "scrooge/quadrature.hpp"

namespace scrooge {

namespace {

constexpr double kEdge = 1e-9;
constexpr double kSymmetric = 1e-9;
constexpr double kRelTol = 1e-10;
constexpr std::size_t kStartNodes = 128;
constexpr std::size_t kMaxNodes = 4096;
constexpr int kLegendreDegree = 8;

double ell(double x, double lambda) { return x / lambda + (1.0 - x) / (1.0 - lambda); }
// Same with 1 - x supplied, which keeps precision when lambda is within
// rounding of 1.
double ell(double x, double y, double lambda) { return x / lambda + y / (1.0 - lambda); }

/// Nodes x_i and weights w_i with sum w_i f(x_i) ~ int_0^1 f(x) / sqrt(x(1-x)) dx,
/// i.e. Gauss-Legendre in theta with x = sin^2(theta). For lambda near 0 or 1
/// the toss profile varies on a theta scale sqrt(lambda) (or sqrt(1-lambda)),
/// so the theta range is split into panels growing geometrically away from
/// each end.
struct ArcsineRule {
  std::vector<double> x;
  std::vector<double> y;  // 1 - x, from cos^2
  std::vector<double> w;

  ArcsineRule(double lambda, std::size_t nodes) {
    const double quarter = 0.25 * std::numbers::pi;
    std::vector<double> cuts{0.0};
    for (double t = std::min(std::asin(std::sqrt(lambda)), quarter) / 4.0; t < quarter; t *= 4.0) cuts.push_back(t);
    cuts.push_back(quarter);
    std::vector<double> upper;
    for (double t = std::min(std::asin(std::sqrt(1.0 - lambda)), quarter) / 4.0; t < quarter; t *= 4.0) {
      upper.push_back(0.5 * std::numbers::pi - t);
    }
    std::reverse(upper.begin(), upper.end());
    cuts.insert(cuts.end(), upper.begin(), upper.end());
    cuts.push_back(0.5 * std::numbers::pi);

    const auto& rule = gauss_legendre(nodes);
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const double mid = 0.5 * (cuts[p] + cuts[p + 1]), half = 0.5 * (cuts[p + 1] - cuts[p]);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = mid + half * rule.nodes[i];
        const double s = std::sin(t), c = std::cos(t);
        x.push_back(s * s);
        y.push_back(c * c);
        w.push_back(2.0 * half * rule.weights[i]);
      }
    }
  }

  template <class F>
  double operator()(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(x[i], y[i]);
    return s;
  }
};

/// int_0^1 f(x, 1-x) / sqrt(x(1-x)) dx with node doubling. `scale` sets the
/// magnitude the tolerance is relative to when the integral itself cancels.
template <class F>
double arcsine_integral(F&& f, double lambda, double scale = 0.0) {
  std::size_t nodes = kStartNodes;
  double prev = ArcsineRule(lambda, nodes)(f);
  while (nodes < kMaxNodes) {
    nodes *= 2;
    const double cur = ArcsineRule(lambda, nodes)(f);
    if (std::abs(cur - prev) <= kRelTol * std::max({std::abs(cur), scale, 1e-300})) return cur;
    prev = cur;
  }
  fail(Errc::QuadratureFailure, "coin integral did not converge");
}

void check_interior(double x) {
  if (!(x > 0.0 && x < 1.0)) fail(Errc::DomainError, "coin bias must lie in (0, 1)");
}

CoinSolution complete(double lambda, double script_N, double script_NH) {
  CoinSolution s;
  s.lambda = lambda;
  s.script_N = script_N;
  const double i32 = arcsine_integral([&](double x, double y) { return std::pow(ell(x, y, lambda), -1.5); }, lambda);
  const double i12 = arcsine_integral([&](double x, double y) { return std::pow(ell(x, y, lambda), -0.5); }, lambda);
  const double x32 = arcsine_integral([&](double x, double y) { return x * std::pow(ell(x, y, lambda), -1.5); }, lambda);
  s.c = script_N * i12 / i32;
  s.A = 1.0 / i32;
  s.script_NH = script_NH < 0.0 ? script_N * x32 / i32 : script_NH;

  // Restriction integrals re-evaluated on the profile itself.
  auto n_of = [&](double x, double y) { return s.c / ell(x, y, lambda); };
  const double t32 = arcsine_integral([&](double x, double y) { return std::pow(n_of(x, y), 1.5); }, lambda);
  const double h32 = arcsine_integral([&](double x, double y) { return x * std::pow(n_of(x, y), 1.5); }, lambda);
  const double g1 = arcsine_integral(
      [&](double x, double y) { return std::pow(n_of(x, y), 1.5) - script_N * std::sqrt(n_of(x, y)); }, lambda, t32);
  const double g2 = arcsine_integral(
      [&](double x, double y) { return x * std::pow(n_of(x, y), 1.5) - s.script_NH * std::sqrt(n_of(x, y)); }, lambda, h32);
  s.residual_total = std::abs(g1) / t32;
  s.residual_heads = std::abs(g2) / h32;
  return s;
}

}  // namespace

double coin_rolls_profile(double x, const CoinSolution& sol) {
  check_interior(x);
  return sol.c / ell(x, sol.lambda);
}

double coin_heads_fraction(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) fail(Errc::DomainError, "lambda must lie in (0, 1)");
  const double den = arcsine_integral([&](double x, double y) { return std::pow(ell(x, y, lambda), -1.5); }, lambda);
  const double num = arcsine_integral([&](double x, double y) { return x * std::pow(ell(x, y, lambda), -1.5); }, lambda);
  return num / den;
}

CoinSolution solve_coin(double script_N, double script_NH) {
  if (!(script_N > 0.0) || !std::isfinite(script_N)) fail(Errc::InvalidArgument, "script_N must be positive");
  if (!(script_NH > 0.0 && script_NH < script_N)) fail(Errc::NoRoot, "need 0 < script_NH < script_N");
  const double target = script_NH / script_N;
  double lo = kEdge, hi = 1.0 - kEdge;
  if (!(coin_heads_fraction(lo) < target && target < coin_heads_fraction(hi))) {
    fail(Errc::NoRoot, "heads fraction outside the attainable range");
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (coin_heads_fraction(mid) < target ? lo : hi) = mid;
  }
  return complete(0.5 * (lo + hi), script_N, script_NH);
}

CoinSolution solve_coin_for_lambda(double lambda, double script_N) {
  if (!(lambda > 0.0 && lambda < 1.0)) fail(Errc::DomainError, "lambda must lie in (0, 1)");
  if (!(script_N > 0.0)) fail(Errc::InvalidArgument, "script_N must be positive");
  return complete(lambda, script_N, -1.0);
}

double coin_signal_density(double x, const CoinSolution& sol) {
  return std::sqrt(coin_rolls_profile(x, sol) / (x * (1.0 - x)));
}

double coin_density(double x, const CoinSolution& sol) {
  check_interior(x);
  return sol.A / (std::sqrt(x * (1.0 - x)) * std::pow(ell(x, sol.lambda), 1.5));
}

double coin_density_mass(const CoinSolution& sol) {
  return arcsine_integral([&](double x, double y) { return sol.A * std::pow(ell(x, y, sol.lambda), -1.5); }, sol.lambda);
}

MismatchReport scrooge_mismatch_report(const CoinSolution& sol) {
  if (std::abs(sol.lambda - 0.5) < kSymmetric) fail(Errc::SymmetricCase, "coin and real Scrooge coincide at 1/2");
  const double lambda = sol.lambda;
  const Spectrum spec({lambda, 1.0 - lambda});
  MismatchReport r;
  r.lambda = lambda;

  constexpr int kGrid = 199;
  double sl = 0, sc = 0, ss = 0, sll = 0, slc = 0, sls = 0;
  for (int i = 0; i < kGrid; ++i) {
    const double x = 0.01 + 0.98 * i / (kGrid - 1);
    const double coin = coin_density(x, sol);
    const double scr = scrooge_real_density(make_simplex_point({x, 1.0 - x}), spec);
    r.sup_norm = std::max(r.sup_norm, std::abs(coin - scr));
    const double root = std::sqrt(x * (1.0 - x));
    const double l = std::log(ell(x, lambda)), yc = std::log(coin * root), ys = std::log(scr * root);
    sl += l;
    sc += yc;
    ss += ys;
    sll += l * l;
    slc += l * yc;
    sls += l * ys;
  }
  const double m = kGrid;
  const double varl = sll - sl * sl / m;
  r.coin_exponent = -(slc - sl * sc / m) / varl;
  r.scrooge_exponent = -(sls - sl * ss / m) / varl;

  // With w = 1/sqrt(x(1-x)) factored out, coin = A L^{-3/2} w while the
  // n = 2 real Scrooge density is 2 / (pi sqrt(lambda(1-lambda))) L^{-2} w, so
  // the log ratio is smooth up to the endpoints.
  const double log_ratio0 = std::log(sol.A * std::numbers::pi * std::sqrt(lambda * (1.0 - lambda)) / 2.0);
  r.kl_nats = arcsine_integral(
      [&](double x, double y) {
        const double l = ell(x, y, lambda);
        return sol.A * std::pow(l, -1.5) * (log_ratio0 + 0.5 * std::log(l));
      },
      lambda);
  return r;
}

namespace {

struct Functionals {
  double F = 0.0, G1 = 0.0, G2 = 0.0;
};

/// Objective and both restrictions on the fixed rule for a given profile.
Functionals functionals(const ArcsineRule& rule, std::span<const double> n, const CoinSolution& sol) {
  Functionals f;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double r = std::sqrt(n[i]);
    f.F += rule.w[i] * r;
    f.G1 += rule.w[i] * (n[i] * r - sol.script_N * r);
    f.G2 += rule.w[i] * (rule.x[i] * n[i] * r - sol.script_NH * r);
  }
  return f;
}

/// Gradients of (G1, G2) along directions N_i * phi(x_i), one row per constraint.
Eigen::MatrixXd constraint_jacobian(const ArcsineRule& rule, std::span<const double> n,
                                    const std::vector<std::vector<double>>& phi, const CoinSolution& sol) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(phi.size()));
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double r = std::sqrt(n[i]);
    const double d1 = 1.5 * r - 0.5 * sol.script_N / r;
    const double d2 = 1.5 * rule.x[i] * r - 0.5 * sol.script_NH / r;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      const double dir = rule.w[i] * n[i] * phi[k][i];
      J(0, static_cast<Eigen::Index>(k)) += d1 * dir;
      J(1, static_cast<Eigen::Index>(k)) += d2 * dir;
    }
  }
  return J;
}

struct TrialResult {
  double increase = 0.0;
  double first_order = 0.0;
  double residual = 0.0;
};

class Perturber {
 public:
  explicit Perturber(const CoinSolution& sol) : sol_(sol), rule_(sol.lambda, 256) {
    const std::size_t m = rule_.x.size();
    base_.resize(m);
    for (std::size_t i = 0; i < m; ++i) base_[i] = sol.c / ell(rule_.x[i], rule_.y[i], sol.lambda);
    legendre_.assign(kLegendreDegree + 1, std::vector<double>(m));
    for (int k = 0; k <= kLegendreDegree; ++k) {
      for (std::size_t i = 0; i < m; ++i) legendre_[k][i] = std::legendre(k, 2.0 * rule_.x[i] - 1.0);
    }
    restore_.assign(2, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      restore_[0][i] = 1.0;
      restore_[1][i] = rule_.x[i];
    }
    base_f_ = functionals(rule_, base_, sol_);
    G_ = constraint_jacobian(rule_, base_, legendre_, sol_);
    grad_f_.resize(kLegendreDegree + 1);
    for (int k = 0; k <= kLegendreDegree; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += rule_.w[i] * 0.5 / std::sqrt(base_[i]) * base_[i] * legendre_[k][i];
      grad_f_[k] = s;
    }
    scale1_ = 0.0;
    scale2_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      scale1_ += rule_.w[i] * std::pow(base_[i], 1.5);
      scale2_ += rule_.w[i] * rule_.x[i] * std::pow(base_[i], 1.5);
    }
  }

  double objective() const { return base_f_.F; }

  /// Feasible unit direction (sup |dN/N| = 1) from raw Legendre coefficients.
  Eigen::VectorXd project(Eigen::VectorXd a) const {
    const Eigen::MatrixXd GGt = G_ * G_.transpose();
    a -= G_.transpose() * GGt.ldlt().solve(G_ * a);
    double sup = 0.0;
    for (std::size_t i = 0; i < rule_.x.size(); ++i) sup = std::max(sup, std::abs(relative(a, i)));
    return a / sup;
  }

  TrialResult run(const Eigen::VectorXd& dir, double size) const {
    TrialResult t;
    t.first_order = std::abs(size * grad_f_.dot(dir)) / (base_f_.F * size);
    const std::size_t m = rule_.x.size();
    std::vector<double> pert(m), cur(m);
    for (std::size_t i = 0; i < m; ++i) pert[i] = base_[i] * (1.0 + size * relative(dir, i));
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (int it = 0; it < 30; ++it) {
      for (std::size_t i = 0; i < m; ++i) cur[i] = pert[i] + base_[i] * (b[0] + b[1] * rule_.x[i]);
      const Functionals f = functionals(rule_, cur, sol_);
      const Eigen::Vector2d g(f.G1, f.G2);
      t.residual = std::max(std::abs(f.G1) / scale1_, std::abs(f.G2) / scale2_);
      if (t.residual < 1e-15) break;
      const Eigen::Matrix2d J = constraint_jacobian(rule_, cur, restore_, sol_);
      b -= J.partialPivLu().solve(g);
    }
    t.increase = (functionals(rule_, cur, sol_).F - base_f_.F) / base_f_.F;
    return t;
  }

  /// Relative change from an infeasible bump centred on x = lambda.
  double control(double size) const {
    std::vector<double> cur(base_);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double z = (rule_.x[i] - sol_.lambda) / 0.1;
      cur[i] *= 1.0 + size * std::exp(-z * z);
    }
    return (functionals(rule_, cur, sol_).F - base_f_.F) / base_f_.F;
  }

 private:
  double relative(const Eigen::VectorXd& a, std::size_t i) const {
    double s = 0.0;
    for (int k = 0; k <= kLegendreDegree; ++k) s += a[k] * legendre_[k][i];
    return s;
  }

  CoinSolution sol_;
  ArcsineRule rule_;
  std::vector<double> base_;
  std::vector<std::vector<double>> legendre_;
  std::vector<std::vector<double>> restore_;
  Functionals base_f_;
  Eigen::MatrixXd G_;
  Eigen::VectorXd grad_f_;
  double scale1_ = 1.0, scale2_ = 1.0;
};

}  // namespace

OptimalityReport variational_optimality_check(const CoinSolution& sol, std::size_t n_perturbations,
                                              const SeedSpec& seed, Parallelism par) {
  if (n_perturbations == 0) fail(Errc::InvalidArgument, "need at least one perturbation");
  const Perturber p(sol);
  OptimalityReport r;
  r.perturbations = n_perturbations;
  std::vector<Eigen::VectorXd> dirs(n_perturbations);
  std::vector<TrialResult> trials(n_perturbations);
  parallel_for(n_perturbations, par, [&](std::size_t t) {
    Rng rng = make_rng(seed.derive(t));
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXd a(kLegendreDegree + 1);
    for (int k = 0; k <= kLegendreDegree; ++k) a[k] = g(rng);
    dirs[t] = p.project(a);
    trials[t] = p.run(dirs[t], r.relative_size);
  });
  r.max_relative_increase = -std::numeric_limits<double>::infinity();
  for (const auto& t : trials) {
    r.max_relative_increase = std::max(r.max_relative_increase, t.increase);
    r.max_first_order = std::max(r.max_first_order, t.first_order);
    r.max_residual = std::max(r.max_residual, t.residual);
  }
  const double d1 = -trials.front().increase;
  const double d2 = -p.run(dirs.front(), 2.0 * r.relative_size).increase;
  r.scaling_ratio = d2 / d1;
  r.control_change = p.control(r.relative_size);
  r.passed = r.max_relative_increase <= 1e-8 && r.max_first_order < 1e-6 && r.max_residual < 1e-12 &&
             r.scaling_ratio > 4.0 / 3.0 && r.scaling_ratio < 12.0 && r.control_change > 1e-5;
  return r;
}

void write_coin_table_csv(std::ostream& out, const CoinSolution& sol, std::size_t points) {
  const Spectrum spec({sol.lambda, 1.0 - sol.lambda});
  out << "x,coin_density,scrooge_real_density\n";
  char buf[96];
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(points + 1);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, coin_density(x, sol),
                  scrooge_real_density(make_simplex_point({x, 1.0 - x}), spec));
    out << buf;
  }
  if (!out) fail(Errc::IoError, "failed writing coin table");
}

}  // namespace scrooge
