#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include "scrooge/core.hpp"

namespace scrooge {

// Densities over the simplex with respect to dx_1 ... dx_{n-1}; phase
// factors (uniform) are left out.

enum class DensityKind { UniformComplexInduced, UniformRealInduced, ScroogeComplex, ScroogeReal, PairedAB };

std::string_view to_string(DensityKind kind) noexcept;

/// (n-1)!, the constant density induced by the uniform complex sphere.
/// Throws Overflow for n > 170.
double uniform_complex_density(std::size_t n);

/// Gamma(n/2) / pi^{n/2} / sqrt(y_1 ... y_n). Throws BoundaryDivergence on faces.
double uniform_real_density(const SimplexPoint& y);
double log_uniform_real_density(const SimplexPoint& y);

/// n! / (lambda_1 ... lambda_n) * (sum_j x_j / lambda_j)^{-(n+1)}.
/// Throws DegenerateSpectrum if some lambda_j <= 0.
double scrooge_complex_density(const SimplexPoint& x, const Spectrum& spec);
double log_scrooge_complex_density(const SimplexPoint& x, const Spectrum& spec);

/// Real-amplitude Scrooge density
///   n Gamma(n/2) / (pi^{n/2} sqrt(prod lambda) sqrt(prod x) (sum x/lambda)^{n/2+1}).
double scrooge_real_density(const SimplexPoint& x, const Spectrum& spec);
double log_scrooge_real_density(const SimplexPoint& x, const Spectrum& spec);

/// Density of a 2n-outcome paired die, coordinates ordered (1a, 1b, 2a, 2b, ...).
/// Throws OddDimension, BoundaryDivergence, DegenerateSpectrum.
double paired_ab_density(const SimplexPoint& xab, const Spectrum& spec);
double log_paired_ab_density(const SimplexPoint& xab, const Spectrum& spec);
/// Same, with per-pair weights given directly (a single pair is allowed).
double log_paired_ab_density(const SimplexPoint& xab, std::span<const double> pair_lambdas);

/// Shannon entropy of the spectrum in nats, 0 ln 0 = 0.
double von_neumann_entropy(const Spectrum& spec);

/// -sum_k (prod_{l != k} lambda_k / (lambda_k - lambda_l)) lambda_k ln lambda_k.
/// Zero eigenvalues drop out; near-degenerate clusters (gap < 1e-9) are split
/// symmetrically and the result extrapolated to zero splitting.
double subentropy(const Spectrum& spec);

/// The raw product formula on distinct positive values, evaluated with 100
/// significant digits; exposed for tests of the degenerate-cluster handling.
long double subentropy_product_formula(std::span<const long double> lambdas);

using SimplexDensity = std::function<double(const SimplexPoint&)>;

/// Binds a density kind to its parameters. For UniformComplexInduced and
/// UniformRealInduced the spectrum only fixes n.
SimplexDensity make_density(DensityKind kind, const Spectrum& spec);

}  // namespace scrooge
