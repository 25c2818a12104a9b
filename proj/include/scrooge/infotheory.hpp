#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "scrooge/core.hpp"
#include "scrooge/distortion.hpp"
#include "scrooge/parallel.hpp"
#include "scrooge/sampling.hpp"

namespace scrooge {

struct MIEstimate {
  double value = 0.0;  // nats
  double std_error = 0.0;
  std::size_t samples_used = 0;
};

inline constexpr std::size_t kBootstrapResamples = 200;

/// Plug-in estimate I = H(pbar) - mean_x H(p(.|x)) over the (weighted)
/// batch, with a nonparametric bootstrap standard error; resample r draws
/// from bootstrap.derive(r). Throws FieldMismatch, DimensionMismatch,
/// TooFewSamples (fewer than 100 samples).
MIEstimate mutual_information(const SampleBatch& batch, const Measurement& meas, const SeedSpec& bootstrap = {},
                              std::size_t resamples = kBootstrapResamples, Parallelism par = {});

/// Exact finite-sum mutual information of a discrete ensemble.
double mutual_information_discrete(const DiscreteEnsemble& ens, const Measurement& meas);

/// A discrete ensemble as a weighted batch, each member repeated so that the
/// batch has at least `min_size` entries; value-equivalent to the finite sum.
SampleBatch batch_from_ensemble(const DiscreteEnsemble& ens, std::size_t min_size = 100);

/// Haar-random orthonormal basis: QR of a Gaussian matrix with the phases
/// of diag(R) divided out.
Measurement random_complete_measurement(std::size_t n, Field field, const SeedSpec& seed);

/// Number of uniforms consumed by haar_basis_from_uniforms.
std::size_t haar_uniform_dimension(std::size_t n, Field field);

/// Orthonormal basis from a point of the unit cube. Column k is uniform on
/// the unit sphere of the complement of columns 0..k-1 (squared moduli by
/// stick-breaking, then phases or signs), so a uniform point gives a Haar
/// basis. Smooth almost everywhere, which suits quasi-Monte Carlo.
Measurement haar_basis_from_uniforms(std::size_t n, Field field, std::span<const double> u);

struct MeasurementResult {
  double value = 0.0;
  double std_error = 0.0;
};

struct IndependenceReport {
  std::vector<double> spectrum;
  Field field = Field::Complex;
  std::size_t samples = 0;
  std::vector<MeasurementResult> measurements;
  double subentropy = 0.0;
  double entropy = 0.0;
  double spread = 0.0;          // max I - min I
  double max_deviation_se = 0.0;  // max |I_k - Q| / se_k
  bool within_3se_of_q = false;
  bool spread_within_3se = false;
};

/// Mutual information of n_meas random complete measurements on one Scrooge
/// batch of n_samples (rejection mode).
IndependenceReport measurement_independence_report(const Spectrum& spec, Field field, std::size_t n_meas,
                                                   std::size_t n_samples, const SeedSpec& seed, Parallelism par = {});

/// Same analysis on a supplied batch (e.g. a non-Scrooge control ensemble)
/// with explicit measurements.
IndependenceReport measurement_independence_report(const SampleBatch& batch, const Spectrum& spec,
                                                   const std::vector<Measurement>& measurements,
                                                   const SeedSpec& seed, Parallelism par = {});

struct AverageReport {
  std::vector<double> spectrum;
  Field field = Field::Complex;
  std::size_t measurements = 0;
  std::size_t replicates = 0;
  double mean = 0.0;
  double std_error = 0.0;  // spread of the randomized replicates
  double subentropy = 0.0;
  double deviation = 0.0;  // mean - Q
};

using AverageSource = std::variant<DiscreteEnsemble, SampleBatch>;

inline constexpr std::size_t kAverageReplicates = 10;

/// Mean mutual information over Haar-random bases by randomized
/// quasi-Monte Carlo: 10 Cranley-Patterson shifts of ceil(n_meas / 10) Sobol
/// points mapped through haar_basis_from_uniforms. Every basis is marginally
/// Haar, so the mean is unbiased; the error comes from the replicate spread.
/// A discrete source must have density matrix diag(spec) within 1e-6
/// (DensityMismatch); batches are taken as supplied.
AverageReport average_mi_report(const AverageSource& source, const Spectrum& spec, std::size_t n_meas,
                                const SeedSpec& seed, Parallelism par = {});

}  // namespace scrooge
