#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "scrooge/core.hpp"
#include "scrooge/densities.hpp"

namespace scrooge {

/// Histogram cells over the simplex. For n = 2 the cells are `bins` equal
/// intervals of x_1. For n >= 3 they are a regular grid in the angle chart
/// (see simplex_chart) with round(bins^(1/(n-1))) divisions per axis, so
/// every cell lies inside the simplex and no clipping is needed.
struct Binning {
  std::size_t bins = 100;
  // Gauss-Legendre nodes per axis for the cell mass integrals.
  std::size_t cell_nodes = 8;
};

class SimplexBins {
 public:
  SimplexBins(std::size_t n, Binning spec);

  std::size_t dimension() const noexcept { return n_; }
  std::size_t count() const noexcept { return count_; }
  std::size_t index(const SimplexPoint& x) const;
  /// Probability of each cell under the density (not renormalized).
  std::vector<double> masses(const SimplexDensity& density) const;

 private:
  std::size_t n_;
  std::size_t per_axis_;
  std::size_t count_;
  std::size_t nodes_;
};

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
  double effective_samples = 0.0;
};

struct FitReport {
  double statistic = 0.0;
  double pvalue = 1.0;
  std::size_t dof = 0;
  std::size_t categories = 0;
  // (sum w)^2 / sum w^2; the sample count when unweighted.
  double effective_samples = 0.0;
  // Total density mass over the cells; expected probabilities are divided by it.
  double density_mass = 0.0;
  // Weighted KS on x_1 (n = 2 only).
  std::optional<KsResult> ks;
};

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// KS p-value for statistic d at effective sample size n, with the
/// Stephens small-sample correction.
double ks_pvalue(double d, double n);

/// Weighted one-sample KS; `weights` may be empty.
KsResult ks_test(std::span<const double> values, std::span<const double> weights,
                 const std::function<double(double)>& cdf);

/// CDF of an unnormalized density on [0, 1], tabulated in t = asin(sqrt(x))
/// so 1/sqrt(x(1-x)) endpoints are harmless. Normalized to F(1) = 1.
class TabulatedCdf {
 public:
  explicit TabulatedCdf(std::function<double(double)> density, std::size_t cells = 1024);

  double operator()(double x) const;
  /// Integral of the density before normalization.
  double total() const noexcept { return total_; }

 private:
  double partial(double t0, double t1) const;

  std::function<double(double)> density_;
  double dt_;
  std::vector<double> cumulative_;
  double total_;
};

/// Chi-square of a (weighted) histogram against the density's cell masses.
/// Cells with expected count below 5 are pooled into one category.
/// Unweighted input uses Pearson's statistic. Weighted input uses the
/// quadratic form of the deviations W_k - W p_k in their estimated
/// covariance (sum over cells of w^2, linearized for the fixed total), which
/// is chi-square with K-1 degrees of freedom under the null.
/// Throws TooFewSamples below 1000 points.
FitReport goodness_of_fit(std::span<const SimplexPoint> points, std::span<const double> weights,
                          const SimplexDensity& density, Binning bins);

/// Weighted fit from per-point weight sums and squared-weight sums, each
/// point standing for several observations at the same location (e.g. one
/// die signal over many rounds). `observations` is the number of underlying
/// draws; KS uses (sum w)^2 / sum w^2 as its sample size.
FitReport goodness_of_fit(std::span<const SimplexPoint> points, std::span<const double> sum_w,
                          std::span<const double> sum_w2, std::size_t observations,
                          const SimplexDensity& density, Binning bins);

/// Same quadratic form for the difference of two normalized histograms.
FitReport two_sample_fit(std::span<const SimplexPoint> a, std::span<const double> wa,
                         std::span<const SimplexPoint> b, std::span<const double> wb, Binning bins);

/// Upper tail of the chi-square distribution; 1 for dof = 0.
double chi_square_pvalue(double statistic, std::size_t dof);

}  // namespace scrooge
