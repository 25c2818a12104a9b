#include "scrooge/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "scrooge/quadrature.hpp"

namespace scrooge {

namespace {

constexpr double kMinExpected = 5.0;

struct CellSums {
  std::vector<double> w;   // sum of weights per cell
  std::vector<double> w2;  // sum of squared weights per cell
  double total = 0.0;
  double total2 = 0.0;

  double effective() const { return total * total / total2; }
};

CellSums accumulate(const SimplexBins& bins, std::span<const SimplexPoint> points, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != points.size()) {
    fail(Errc::DimensionMismatch, "weights and points differ in length");
  }
  CellSums s;
  s.w.assign(bins.count(), 0.0);
  s.w2.assign(bins.count(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != bins.dimension()) fail(Errc::DimensionMismatch, "point dimension differs from binning");
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) fail(Errc::InvalidArgument, "weights must be positive and finite");
    const std::size_t k = bins.index(points[i]);
    s.w[k] += w;
    s.w2[k] += w * w;
    s.total += w;
    s.total2 += w * w;
  }
  return s;
}

/// Maps cells to categories: cells whose expected count is at least 5 keep
/// their own category; the rest share one. A pooled category that is still
/// too small is folded into the smallest regular one.
std::vector<std::size_t> pool_cells(std::span<const double> expected, std::size_t& categories) {
  const std::size_t cells = expected.size();
  std::vector<std::size_t> cat(cells, 0);
  std::size_t next = 0;
  std::vector<std::size_t> small;
  double small_mass = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    if (expected[k] >= kMinExpected) {
      cat[k] = next++;
    } else {
      small.push_back(k);
      small_mass += expected[k];
    }
  }
  if (small.empty()) {
    categories = next;
    return cat;
  }
  std::size_t pooled = next;
  if (small_mass < kMinExpected && next > 0) {
    std::size_t smallest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cells; ++k) {
      if (expected[k] >= kMinExpected && expected[k] < best) {
        best = expected[k];
        smallest = cat[k];
      }
    }
    pooled = smallest;
  } else {
    ++next;
  }
  for (std::size_t k : small) cat[k] = pooled;
  categories = next;
  return cat;
}

std::vector<double> collapse(std::span<const double> v, const std::vector<std::size_t>& cat, std::size_t categories) {
  std::vector<double> out(categories, 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) out[cat[k]] += v[k];
  return out;
}

/// Covariance estimate of the weighted cell totals around W p, given the
/// per-category sums of squared weights.
Eigen::MatrixXd weighted_covariance(const std::vector<double>& a, const std::vector<double>& p) {
  const auto k = static_cast<Eigen::Index>(a.size());
  const Eigen::Map<const Eigen::VectorXd> av(a.data(), k), pv(p.data(), k);
  const double total = av.sum();
  Eigen::MatrixXd cov = av.asDiagonal();
  cov -= av * pv.transpose() + pv * av.transpose();
  cov += total * pv * pv.transpose();
  return cov;
}

/// z^T C^{-1} z over the first K-1 components (the last is implied by the
/// fixed total).
double quadratic_form(const Eigen::VectorXd& z, const Eigen::MatrixXd& cov) {
  const Eigen::Index m = z.size() - 1;
  if (m <= 0) return 0.0;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov.topLeftCorner(m, m));
  if (ldlt.info() != Eigen::Success) fail(Errc::DomainError, "singular histogram covariance");
  const Eigen::VectorXd head = z.head(m);
  return head.dot(ldlt.solve(head));
}

}  // namespace

SimplexBins::SimplexBins(std::size_t n, Binning spec) : n_(n), nodes_(spec.cell_nodes) {
  if (n < 2) fail(Errc::DimensionTooSmall, "n >= 2 required");
  if (spec.bins < 2) fail(Errc::InvalidArgument, "at least two bins required");
  if (nodes_ < 1) fail(Errc::InvalidArgument, "cell_nodes >= 1 required");
  if (n == 2) {
    per_axis_ = spec.bins;
    count_ = spec.bins;
  } else {
    const double root = std::pow(static_cast<double>(spec.bins), 1.0 / static_cast<double>(n - 1));
    per_axis_ = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(root)));
    count_ = 1;
    for (std::size_t d = 0; d + 1 < n; ++d) count_ *= per_axis_;
  }
}

std::size_t SimplexBins::index(const SimplexPoint& x) const {
  if (n_ == 2) {
    return std::min(per_axis_ - 1, static_cast<std::size_t>(x[0] * static_cast<double>(per_axis_)));
  }
  std::vector<double> theta(n_ - 1);
  simplex_chart::to_angles(x.coords(), theta);
  std::size_t idx = 0;
  for (double t : theta) {
    const auto c = static_cast<std::size_t>(t / simplex_chart::kHalfPi * static_cast<double>(per_axis_));
    idx = idx * per_axis_ + std::min(per_axis_ - 1, c);
  }
  return idx;
}

std::vector<double> SimplexBins::masses(const SimplexDensity& density) const {
  std::vector<double> out(count_, 0.0);
  if (n_ == 2) {
    const double h = 1.0 / static_cast<double>(per_axis_);
    auto f = [&](double x) { return density(make_simplex_point({x, 1.0 - x})); };
    for (std::size_t k = 0; k < count_; ++k) {
      out[k] = integrate_arcsine_fixed(f, h * static_cast<double>(k), h * static_cast<double>(k + 1), nodes_);
    }
    return out;
  }
  const std::size_t dim = n_ - 1;
  const auto& rule = gauss_legendre(nodes_);
  const double h = simplex_chart::kHalfPi / static_cast<double>(per_axis_);
  const double cell_scale = std::pow(0.5 * h, static_cast<double>(dim));
  std::vector<std::size_t> cell(dim), node(dim);
  std::vector<double> theta(dim), x(n_);
  for (std::size_t k = 0; k < count_; ++k) {
    std::size_t rem = k;
    for (std::size_t d = dim; d-- > 0;) {
      cell[d] = rem % per_axis_;
      rem /= per_axis_;
    }
    double sum = 0.0;
    std::fill(node.begin(), node.end(), 0);
    for (;;) {
      double w = 1.0;
      for (std::size_t d = 0; d < dim; ++d) {
        theta[d] = h * (static_cast<double>(cell[d]) + 0.5 * (1.0 + rule.nodes[node[d]]));
        w *= rule.weights[node[d]];
      }
      const double jac = simplex_chart::to_simplex(theta, x);
      sum += w * jac * density(make_simplex_point(x));
      std::size_t d = 0;
      while (d < dim && ++node[d] == nodes_) node[d++] = 0;
      if (d == dim) break;
    }
    out[k] = sum * cell_scale;
  }
  return out;
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.0) {
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(-m * m * pi * pi / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, double n) {
  const double en = std::sqrt(n);
  return kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
}

KsResult ks_test(std::span<const double> values, std::span<const double> weights,
                 const std::function<double(double)>& cdf) {
  if (values.empty()) fail(Errc::TooFewSamples, "KS test needs samples");
  if (!weights.empty() && weights.size() != values.size()) {
    fail(Errc::DimensionMismatch, "weights and values differ in length");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0, total2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total += w;
    total2 += w * w;
  }
  double cum = 0.0, d = 0.0;
  for (std::size_t idx : order) {
    const double f = cdf(values[idx]);
    const double below = cum / total;
    cum += weights.empty() ? 1.0 : weights[idx];
    const double above = cum / total;
    d = std::max({d, std::abs(f - below), std::abs(above - f)});
  }
  KsResult r;
  r.statistic = d;
  r.effective_samples = total * total / total2;
  r.pvalue = ks_pvalue(d, r.effective_samples);
  return r;
}

TabulatedCdf::TabulatedCdf(std::function<double(double)> density, std::size_t cells)
    : density_(std::move(density)), dt_(simplex_chart::kHalfPi / static_cast<double>(cells)), cumulative_(cells + 1, 0.0) {
  for (std::size_t i = 0; i < cells; ++i) {
    cumulative_[i + 1] = cumulative_[i] + partial(dt_ * static_cast<double>(i), dt_ * static_cast<double>(i + 1));
  }
  total_ = cumulative_.back();
  if (!(total_ > 0.0) || !std::isfinite(total_)) fail(Errc::QuadratureFailure, "density has no finite positive mass");
}

double TabulatedCdf::partial(double t0, double t1) const {
  if (!(t1 > t0)) return 0.0;
  auto g = [&](double t) {
    const double s = std::sin(t), c = std::cos(t);
    return density_(s * s) * 2.0 * s * c;
  };
  return integrate_fixed(g, t0, t1, 16);
}

double TabulatedCdf::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double t = std::asin(std::sqrt(x));
  const std::size_t cells = cumulative_.size() - 1;
  const std::size_t i = std::min(cells - 1, static_cast<std::size_t>(t / dt_));
  return std::clamp((cumulative_[i] + partial(dt_ * static_cast<double>(i), t)) / total_, 0.0, 1.0);
}

double chi_square_pvalue(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (!(statistic > 0.0)) return 1.0;
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

namespace {

FitReport fit_sums(const SimplexBins& bins, const CellSums& sums, const SimplexDensity& density, bool weighted) {
  std::vector<double> p = bins.masses(density);
  FitReport r;
  r.density_mass = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(r.density_mass > 0.0)) fail(Errc::QuadratureFailure, "density has no mass over the bins");
  for (double& v : p) v /= r.density_mass;
  r.effective_samples = sums.effective();

  std::vector<double> expected(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) expected[k] = r.effective_samples * p[k];
  const auto cat = pool_cells(expected, r.categories);
  const auto pc = collapse(p, cat, r.categories);
  const auto wc = collapse(sums.w, cat, r.categories);
  r.dof = r.categories > 0 ? r.categories - 1 : 0;

  if (!weighted) {
    const double total = sums.total;
    for (std::size_t c = 0; c < r.categories; ++c) {
      const double e = total * pc[c];
      r.statistic += (wc[c] - e) * (wc[c] - e) / e;
    }
  } else {
    const auto ac = collapse(sums.w2, cat, r.categories);
    Eigen::VectorXd z(static_cast<Eigen::Index>(r.categories));
    for (std::size_t c = 0; c < r.categories; ++c) z[static_cast<Eigen::Index>(c)] = wc[c] - sums.total * pc[c];
    r.statistic = quadratic_form(z, weighted_covariance(ac, pc));
  }
  r.pvalue = chi_square_pvalue(r.statistic, r.dof);
  return r;
}

KsResult ks_on_first(std::span<const SimplexPoint> points, std::span<const double> weights,
                     const SimplexDensity& density) {
  std::vector<double> x1(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) x1[i] = points[i][0];
  const TabulatedCdf cdf([&](double x) { return density(make_simplex_point({x, 1.0 - x})); });
  return ks_test(x1, weights, [&](double x) { return cdf(x); });
}

}  // namespace

FitReport goodness_of_fit(std::span<const SimplexPoint> points, std::span<const double> weights,
                          const SimplexDensity& density, Binning binning) {
  if (points.size() < 1000) fail(Errc::TooFewSamples, "goodness of fit needs at least 1000 points");
  const std::size_t n = points.front().size();
  const SimplexBins bins(n, binning);
  FitReport r = fit_sums(bins, accumulate(bins, points, weights), density, !weights.empty());
  if (n == 2) r.ks = ks_on_first(points, weights, density);
  return r;
}

FitReport goodness_of_fit(std::span<const SimplexPoint> points, std::span<const double> sum_w,
                          std::span<const double> sum_w2, std::size_t observations,
                          const SimplexDensity& density, Binning binning) {
  if (observations < 1000) fail(Errc::TooFewSamples, "goodness of fit needs at least 1000 observations");
  if (points.empty()) fail(Errc::TooFewSamples, "no weighted points");
  if (sum_w.size() != points.size() || sum_w2.size() != points.size()) {
    fail(Errc::DimensionMismatch, "weight sums and points differ in length");
  }
  const std::size_t n = points.front().size();
  const SimplexBins bins(n, binning);
  CellSums s;
  s.w.assign(bins.count(), 0.0);
  s.w2.assign(bins.count(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != n) fail(Errc::DimensionMismatch, "point dimension differs from binning");
    if (!(sum_w[i] > 0.0) || !(sum_w2[i] > 0.0)) fail(Errc::InvalidArgument, "weight sums must be positive");
    const std::size_t k = bins.index(points[i]);
    s.w[k] += sum_w[i];
    s.w2[k] += sum_w2[i];
    s.total += sum_w[i];
    s.total2 += sum_w2[i];
  }
  FitReport r = fit_sums(bins, s, density, true);
  if (n == 2) {
    KsResult ks = ks_on_first(points, sum_w, density);
    ks.effective_samples = r.effective_samples;
    ks.pvalue = ks_pvalue(ks.statistic, ks.effective_samples);
    r.ks = ks;
  }
  return r;
}

FitReport two_sample_fit(std::span<const SimplexPoint> a, std::span<const double> wa,
                         std::span<const SimplexPoint> b, std::span<const double> wb, Binning binning) {
  if (a.size() < 1000 || b.size() < 1000) fail(Errc::TooFewSamples, "two-sample fit needs 1000 points per sample");
  const std::size_t n = a.front().size();
  if (b.front().size() != n) fail(Errc::DimensionMismatch, "samples differ in dimension");
  const SimplexBins bins(n, binning);
  const CellSums sa = accumulate(bins, a, wa);
  const CellSums sb = accumulate(bins, b, wb);

  FitReport r;
  r.effective_samples = std::min(sa.effective(), sb.effective());
  r.density_mass = 1.0;
  std::vector<double> expected(bins.count());
  for (std::size_t k = 0; k < bins.count(); ++k) {
    const double pooled = 0.5 * (sa.w[k] / sa.total + sb.w[k] / sb.total);
    expected[k] = r.effective_samples * pooled;
  }
  const auto cat = pool_cells(expected, r.categories);
  r.dof = r.categories > 0 ? r.categories - 1 : 0;

  auto fractions = [&](const CellSums& s) {
    auto f = collapse(s.w, cat, r.categories);
    for (double& v : f) v /= s.total;
    return f;
  };
  const auto fa = fractions(sa), fb = fractions(sb);
  const Eigen::MatrixXd cov = weighted_covariance(collapse(sa.w2, cat, r.categories), fa) / (sa.total * sa.total) +
                              weighted_covariance(collapse(sb.w2, cat, r.categories), fb) / (sb.total * sb.total);
  Eigen::VectorXd z(static_cast<Eigen::Index>(r.categories));
  for (std::size_t c = 0; c < r.categories; ++c) z[static_cast<Eigen::Index>(c)] = fa[c] - fb[c];
  r.statistic = quadratic_form(z, cov);
  r.pvalue = chi_square_pvalue(r.statistic, r.dof);
  return r;
}

}  // namespace scrooge
