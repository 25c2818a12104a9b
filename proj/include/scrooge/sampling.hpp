#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "scrooge/core.hpp"
#include "scrooge/parallel.hpp"

namespace scrooge {

enum class SamplingMode { Rejection, Importance };

/// Sampled pure states together with their squared-amplitude points.
/// `weights` is empty for unweighted batches.
struct SampleBatch {
  Field field = Field::Complex;
  std::size_t dimension = 0;
  std::vector<PureState> states;
  std::vector<SimplexPoint> points;
  std::vector<double> weights;
  SeedSpec seed_spec;
  // Proposals drawn; equals size() except in rejection mode.
  std::size_t attempts = 0;

  std::size_t size() const noexcept { return states.size(); }
  bool weighted() const noexcept { return !weights.empty(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  double acceptance_rate() const;
};

/// Samples per shard; shard s draws from seed.derive(s).
inline constexpr std::size_t kShardSize = 4096;

/// Haar-random pure state: normalized i.i.d. standard Gaussians
/// (n reals, or n complex numbers with Gaussian real and imaginary parts).
PureState sample_sphere_state(std::size_t n, Field field, Rng& rng);

SampleBatch sample_uniform_sphere(std::size_t n, Field field, std::size_t count, const SeedSpec& seed,
                                  Parallelism par = {});

/// Distortion of the uniform sphere by diag(spec). Rejection mode accepts a
/// proposal y with probability <y|rho|y> / lambda_max (expected rate
/// 1/(n lambda_max)) and returns `count` accepted samples; importance mode
/// keeps every proposal with weight n <y|rho|y>.
/// Throws DegenerateSpectrum if some lambda_j <= 0.
SampleBatch sample_scrooge(const Spectrum& spec, Field field, std::size_t count, SamplingMode mode,
                           const SeedSpec& seed, Parallelism par = {});

// CSV layout: a name line "field,n,seed,stream", its value line, then one row
// per sample "x_1..x_n,theta_1..theta_{n-1},weight".
void write_batch_csv(std::ostream& out, const SampleBatch& batch);
SampleBatch read_batch_csv(std::istream& in);

}  // namespace scrooge
