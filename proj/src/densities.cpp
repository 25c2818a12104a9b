#include "scrooge/densities.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace scrooge {

namespace {

const double kLogPi = std::log(std::numbers::pi);

double sum_log_lambda(std::span<const double> lambdas) {
  double s = 0.0;
  for (double l : lambdas) {
    if (!(l > 0.0)) fail(Errc::DegenerateSpectrum, "zero eigenvalue: reduce to the support face first");
    s += std::log(l);
  }
  return s;
}

double sum_log_coords(const SimplexPoint& x) {
  double s = 0.0;
  for (double v : x) {
    if (!(v > 0.0)) fail(Errc::BoundaryDivergence, "density diverges on the simplex boundary");
    s += std::log(v);
  }
  return s;
}

void check_same_size(const SimplexPoint& x, const Spectrum& spec) {
  if (x.size() != spec.size()) fail(Errc::DimensionMismatch, "point and spectrum dimensions differ");
}

double weighted_ratio_sum(const SimplexPoint& x, const Spectrum& spec) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] / spec[j];
  return s;
}

}  // namespace

std::string_view to_string(DensityKind kind) noexcept {
  switch (kind) {
    case DensityKind::UniformComplexInduced: return "uniform-complex";
    case DensityKind::UniformRealInduced: return "uniform-real";
    case DensityKind::ScroogeComplex: return "scrooge-complex";
    case DensityKind::ScroogeReal: return "scrooge-real";
    case DensityKind::PairedAB: return "paired-ab";
  }
  return "unknown";
}

double uniform_complex_density(std::size_t n) {
  if (n < 2) fail(Errc::DimensionTooSmall, "n >= 2 required");
  if (n > 170) fail(Errc::Overflow, "(n-1)! overflows double for n > 170");
  double f = 1.0;
  for (std::size_t k = 2; k < n; ++k) f *= static_cast<double>(k);
  return f;
}

double log_uniform_real_density(const SimplexPoint& y) {
  const double n = static_cast<double>(y.size());
  return std::lgamma(0.5 * n) - 0.5 * n * kLogPi - 0.5 * sum_log_coords(y);
}

double uniform_real_density(const SimplexPoint& y) { return std::exp(log_uniform_real_density(y)); }

double log_scrooge_complex_density(const SimplexPoint& x, const Spectrum& spec) {
  check_same_size(x, spec);
  const double n = static_cast<double>(x.size());
  const double log_prod = sum_log_lambda(spec.values());
  return std::lgamma(n + 1.0) - log_prod - (n + 1.0) * std::log(weighted_ratio_sum(x, spec));
}

double scrooge_complex_density(const SimplexPoint& x, const Spectrum& spec) {
  return std::exp(log_scrooge_complex_density(x, spec));
}

double log_scrooge_real_density(const SimplexPoint& x, const Spectrum& spec) {
  check_same_size(x, spec);
  const double n = static_cast<double>(x.size());
  const double log_prod = sum_log_lambda(spec.values());
  const double log_x = sum_log_coords(x);
  return std::log(n) + std::lgamma(0.5 * n) - 0.5 * n * kLogPi - 0.5 * log_prod - 0.5 * log_x -
         (0.5 * n + 1.0) * std::log(weighted_ratio_sum(x, spec));
}

double scrooge_real_density(const SimplexPoint& x, const Spectrum& spec) {
  return std::exp(log_scrooge_real_density(x, spec));
}

double log_paired_ab_density(const SimplexPoint& xab, std::span<const double> pair_lambdas) {
  if (xab.size() % 2 != 0) fail(Errc::OddDimension, "paired density needs an even outcome count");
  const std::size_t pairs = xab.size() / 2;
  if (pair_lambdas.size() != pairs) fail(Errc::DimensionMismatch, "need one weight per outcome pair");
  const double n = static_cast<double>(pairs);
  const double log_prod = sum_log_lambda(pair_lambdas);
  const double log_x = sum_log_coords(xab);
  double s = 0.0;
  for (std::size_t j = 0; j < pairs; ++j) s += (xab[2 * j] + xab[2 * j + 1]) / pair_lambdas[j];
  return std::log(n) + std::lgamma(n) - n * kLogPi - log_prod - 0.5 * log_x - (n + 1.0) * std::log(s);
}

double log_paired_ab_density(const SimplexPoint& xab, const Spectrum& spec) {
  return log_paired_ab_density(xab, spec.values());
}

double paired_ab_density(const SimplexPoint& xab, const Spectrum& spec) {
  return std::exp(log_paired_ab_density(xab, spec));
}

double von_neumann_entropy(const Spectrum& spec) {
  double s = 0.0;
  for (double l : spec.values()) {
    if (l > 0.0) s -= l * std::log(l);
  }
  return s;
}

namespace {

// The product formula cancels catastrophically when eigenvalues are close:
// roundoff grows like eps / gap^(m-1) for m nearby values. 100 significant
// digits keep it far below double resolution for the gaps and splittings
// used here.
using Wide = boost::multiprecision::cpp_bin_float_100;

constexpr double kClusterGap = 1e-9;
constexpr double kSplit = 1e-6;
// Values this small contribute below double resolution and would only make
// cluster splitting cross zero.
constexpr double kNegligible = 1e-15;

template <class T>
T product_formula(std::span<const T> v, T* magnitude = nullptr) {
  using std::abs;
  using std::log;
  T q = 0, mag = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    T coef = 1;
    for (std::size_t l = 0; l < v.size(); ++l) {
      if (l != k) coef *= v[k] / (v[k] - v[l]);
    }
    const T term = coef * v[k] * log(v[k]);
    q -= term;
    mag += abs(term);
  }
  if (magnitude) *magnitude = mag;
  return q;
}

Wide product_formula(const std::vector<Wide>& v) { return product_formula<Wide>(std::span<const Wide>(v)); }

// Long double when the sum loses at most ~3 of its 19 digits to
// cancellation, 100 digits otherwise.
double product_formula_adaptive(const std::vector<double>& values) {
  const std::vector<long double> v(values.begin(), values.end());
  long double mag = 0.0L;
  const long double q = product_formula<long double>(std::span<const long double>(v), &mag);
  if (mag <= 1e3L * std::abs(q)) return static_cast<double>(q);
  return static_cast<double>(product_formula(std::vector<Wide>(values.begin(), values.end())));
}

struct Cluster {
  Wide mean;
  std::size_t size;
};

Wide split_evaluate(const std::vector<Cluster>& clusters, double scale) {
  std::vector<Wide> values;
  for (const Cluster& c : clusters) {
    if (c.size == 1) {
      values.push_back(c.mean);
      continue;
    }
    // Keep the split inside (0, 2 mean) for clusters of tiny values.
    Wide w = kSplit;
    if (w * (c.size - 1) > c.mean) w = c.mean / (c.size - 1);
    w *= scale;
    for (std::size_t i = 0; i < c.size; ++i) {
      values.push_back(c.mean + w * (Wide(i) - Wide(c.size - 1) / 2));
    }
  }
  return product_formula(values);
}

}  // namespace

long double subentropy_product_formula(std::span<const long double> lambdas) {
  std::vector<Wide> v(lambdas.begin(), lambdas.end());
  return static_cast<long double>(product_formula(v));
}

double subentropy(const Spectrum& spec) {
  std::vector<double> values;
  for (double l : spec.values()) {
    if (l > kNegligible) values.push_back(l);
  }
  if (values.size() <= 1) return 0.0;
  std::sort(values.begin(), values.end());

  std::vector<Cluster> clusters;
  bool degenerate = false;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] - values[i - 1] >= kClusterGap) {
      Wide sum = 0;
      for (std::size_t j = start; j < i; ++j) sum += values[j];
      clusters.push_back({sum / (i - start), i - start});
      degenerate = degenerate || i - start > 1;
      start = i;
    }
  }
  if (!degenerate) return product_formula_adaptive(values);

  // Symmetric splitting has no first-order effect, so Q(w) = Q0 + c w^2 + ...
  const Wide q_full = split_evaluate(clusters, 1.0);
  const Wide q_half = split_evaluate(clusters, 0.5);
  return static_cast<double>((4 * q_half - q_full) / 3);
}

SimplexDensity make_density(DensityKind kind, const Spectrum& spec) {
  switch (kind) {
    case DensityKind::UniformComplexInduced: {
      const double c = uniform_complex_density(spec.size());
      const std::size_t n = spec.size();
      return [c, n](const SimplexPoint& x) {
        if (x.size() != n) fail(Errc::DimensionMismatch, "density dimension");
        return c;
      };
    }
    case DensityKind::UniformRealInduced:
      return [](const SimplexPoint& x) { return uniform_real_density(x); };
    case DensityKind::ScroogeComplex:
      return [spec](const SimplexPoint& x) { return scrooge_complex_density(x, spec); };
    case DensityKind::ScroogeReal:
      return [spec](const SimplexPoint& x) { return scrooge_real_density(x, spec); };
    case DensityKind::PairedAB:
      return [spec](const SimplexPoint& x) { return paired_ab_density(x, spec); };
  }
  fail(Errc::InvalidArgument, "unknown density kind");
}

}  // namespace scrooge
