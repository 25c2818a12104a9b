#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "scrooge/core.hpp"
#include "scrooge/densities.hpp"
#include "scrooge/fit.hpp"
#include "scrooge/parallel.hpp"

namespace scrooge {

enum class DieMode { RealDie, PairedDie };
enum class Placement { Lattice, UniformRandom };
enum class RollWeighting { Realized, Expected };

/// `bounds` holds one expectation cap per outcome for RealDie and one per
/// pair for PairedDie (which then has 2 * bounds.size() outcomes).
struct ChannelConfig {
  std::vector<double> bounds;
  double d_min = 1.0;
  DieMode mode = DieMode::RealDie;
  Placement placement = Placement::Lattice;

  std::size_t outcomes() const noexcept { return mode == DieMode::PairedDie ? 2 * bounds.size() : bounds.size(); }
  /// Bound ratios M_j / M, the spectrum the channel should reproduce.
  Spectrum spectrum() const;
  /// Throws DimensionTooSmall or InvalidArgument.
  void validate() const;
};

/// Square roots of the mean counts; M_j = alpha_j^2.
struct DieSignal {
  std::vector<double> alpha;

  double total_mean() const;
};

/// Flat storage for large constellations: signal i occupies
/// alpha[i * outcomes .. (i+1) * outcomes).
struct SignalSet {
  std::size_t outcomes = 0;
  std::vector<double> alpha;

  SignalSet() = default;
  explicit SignalSet(std::span<const DieSignal> signals);

  std::size_t size() const noexcept { return outcomes ? alpha.size() / outcomes : 0; }
  std::span<const double> at(std::size_t i) const { return {alpha.data() + i * outcomes, outcomes}; }
  double total_mean(std::size_t i) const;
  std::vector<DieSignal> to_signals() const;
};

/// Ellipsoid semi-axes per outcome: sqrt((n+2) M_j) for a real die of n
/// outcomes; sqrt((n+1) M_j) for both members of pair j of an n-pair die,
/// i.e. sqrt((d+2) M_j/2) with d = 2n.
std::vector<double> semi_axes(const ChannelConfig& config);

/// sqrt(sum (dM_j)^2 / Mbar_j) with Mbar the midpoint means.
/// Throws NonpositiveMean.
double fisher_separation(std::span<const double> m1, std::span<const double> m2);

/// Lattice: the cubic lattice of spacing d_min/2 with points at cell
/// centres (i + 1/2) d_min/2, kept when inside the positive ellipsoid
/// section. UniformRandom: as many i.i.d. volume-uniform points.
/// Throws EmptyRegion when no lattice point fits.
std::vector<DieSignal> place_signals(const ChannelConfig& config, const SeedSpec& seed = {});
SignalSet place_signal_set(const ChannelConfig& config, const SeedSpec& seed = {});

/// Number of lattice points place_signals would return.
std::size_t lattice_count(const ChannelConfig& config);

/// d_min whose lattice cells tile the region with about `target` points.
double dmin_for_signal_count(const ChannelConfig& config, std::size_t target);

struct MomentCheck {
  // Per outcome for RealDie, per pair (member sum) for PairedDie.
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> target;
  double max_z = 0.0;
  bool passed = false;  // every |mean - target| < 3 std_error
};

/// Monte Carlo mean of alpha_j^2 over the region from n_mc uniform points.
MomentCheck region_moment_check(const ChannelConfig& config, std::size_t n_mc, const SeedSpec& seed);

/// Closed, positive ellipsoid section test.
bool inside_region(std::span<const double> alpha, std::span<const double> axes, double slack = 1e-12);

struct RollRecord {
  std::size_t signal_index = 0;
  std::vector<std::uint32_t> counts;
};

/// Flat roll log: round r used signal `signal[r]` and produced counts
/// counts[r * outcomes .. (r+1) * outcomes).
struct RollLog {
  std::size_t outcomes = 0;
  std::vector<std::uint32_t> signal;
  std::vector<std::uint32_t> counts;

  std::size_t rounds() const noexcept { return signal.size(); }
  RollRecord record(std::size_t r) const;
  std::uint64_t total(std::size_t r) const;
};

/// Each round picks a signal uniformly and draws N_j ~ Poisson(alpha_j^2).
/// Rounds are split into fixed shards, shard s drawing from seed.derive(s).
RollLog roll_dice(const SignalSet& signals, std::size_t rounds, const SeedSpec& seed, Parallelism par = {});
RollLog roll_dice(std::span<const DieSignal> signals, std::size_t rounds, const SeedSpec& seed, Parallelism par = {});

/// Weighted point set x = alpha^2 / |alpha|^2 per signal, aggregated over
/// rounds: `weight` sums the per-round weights (realized N, or the expected
/// |alpha|^2) and `weight_sq` their squares.
struct InducedDensity {
  std::vector<SimplexPoint> points;
  std::vector<double> weight;
  std::vector<double> weight_sq;
  std::size_t rounds = 0;
  RollWeighting weighting = RollWeighting::Realized;

  double total_weight() const;
  /// Normalized histogram masses over the bins.
  std::vector<double> histogram(const SimplexBins& bins) const;
  FitReport fit(const SimplexDensity& density, Binning bins) const;
};

/// Throws TooFewSamples below 1000 rounds.
InducedDensity induced_density(const SignalSet& signals, const RollLog& rolls,
                               RollWeighting weighting = RollWeighting::Realized);
InducedDensity induced_density(std::span<const DieSignal> signals, const RollLog& rolls,
                               RollWeighting weighting = RollWeighting::Realized);

/// alpha_max = 1 / sqrt(sum x_j / s_j^2), where the ray alpha_j = sqrt(x_j) a
/// leaves the ellipsoid; sqrt((n+2) / sum x_j / M_j) for a real die.
double alpha_max(const SimplexPoint& x, const ChannelConfig& config);

/// Pair sums (x_1a + x_1b, x_2a + x_2b, ...). Throws OddDimension.
SimplexPoint ab_blind_marginalize(const SimplexPoint& xab);
std::vector<SimplexPoint> ab_blind_marginalize(std::span<const SimplexPoint> xab);
/// Weights are carried over unchanged.
InducedDensity ab_blind_marginalize(const InducedDensity& ab);

// CSV "signal_index,N_1..N_k".
void write_rolls_csv(std::ostream& out, const RollLog& rolls);
RollLog read_rolls_csv(std::istream& in);

}  // namespace scrooge
