#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "scrooge/error.hpp"

namespace scrooge {

using cplx = std::complex<double>;

namespace tol {
inline constexpr double construction = 1e-12;
inline constexpr double completeness = 1e-9;
inline constexpr double probability_sum = 1e-10;
// Accepted deviation of a user-supplied simplex point before renormalizing.
inline constexpr double simplex_input = 1e-9;
}  // namespace tol

enum class Field { Real, Complex };

std::string_view to_string(Field field) noexcept;
Field parse_field(std::string_view text);

/// Eigenvalues of a density matrix (or the bound ratios M_j / M of a die
/// channel). Normalized on construction; the order is kept as supplied.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> lambdas);

  static Spectrum uniform(std::size_t n);

  std::size_t size() const noexcept { return lambdas_.size(); }
  double operator[](std::size_t j) const { return lambdas_[j]; }
  std::span<const double> values() const noexcept { return lambdas_; }
  double max() const noexcept;
  bool strictly_positive() const noexcept;

 private:
  std::vector<double> lambdas_;
};

/// A point of the probability simplex with all n coordinates stored. The last
/// coordinate is recomputed as one minus the others at construction.
class SimplexPoint {
 public:
  SimplexPoint() = default;

  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t j) const { return coords_[j]; }
  std::span<const double> coords() const noexcept { return coords_; }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  friend SimplexPoint make_simplex_point(std::vector<double> coords);
  explicit SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {}

  std::vector<double> coords_;
};

/// Validates, clamps tiny negatives to zero and renormalizes.
/// Throws DimensionTooSmall, NegativeCoordinate or NotNormalized.
SimplexPoint make_simplex_point(std::vector<double> coords);

/// Pure state sum_j a_j e^{-i theta_j} |e_j> in the eigenbasis, with the
/// global phase fixed by theta_n = 0. Real-field states only carry phases
/// 0 or pi (signs).
class PureState {
 public:
  PureState() = default;

  static PureState from_polar(Field field, std::vector<double> amplitudes,
                              std::vector<double> phases);
  /// Normalizes the vector and fixes the global phase.
  static PureState from_vector(Field field, std::span<const cplx> vec);
  static PureState basis(Field field, std::size_t n, std::size_t j);

  Field field() const noexcept { return field_; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  std::span<const double> phases() const noexcept { return phases_; }

  /// Components a_j e^{-i theta_j}.
  std::vector<cplx> vector() const;
  void write_vector(std::span<cplx> out) const;

 private:
  PureState(Field field, std::vector<double> amplitudes, std::vector<double> phases)
      : field_(field), amplitudes_(std::move(amplitudes)), phases_(std::move(phases)) {}

  Field field_ = Field::Complex;
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
};

/// Squared amplitudes: the outcome probabilities of the eigenbasis measurement.
SimplexPoint state_probabilities(const PureState& state);

struct Effect {
  double weight = 1.0;
  PureState direction;
};

/// POVM built from weighted rank-1 effects w_k |v_k><v_k| summing to the
/// identity. Several effects may be pooled into one reported outcome
/// (`outcome_of`); a measurement is complete when no pooling happens.
class Measurement {
 public:
  Measurement(Field field, std::vector<Effect> effects,
              std::vector<std::size_t> outcome_of = {});

  /// Orthonormal basis given column-wise; unit weights.
  static Measurement from_basis(Field field, const std::vector<std::vector<cplx>>& columns);
  static Measurement eigenbasis(std::size_t n, Field field);
  /// Single outcome: every eigenbasis effect is pooled together.
  static Measurement trivial(std::size_t n, Field field);

  Field field() const noexcept { return field_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t effect_count() const noexcept { return effects_.size(); }
  std::size_t outcome_count() const noexcept { return outcomes_; }
  bool is_complete() const noexcept { return outcomes_ == effects_.size(); }
  const std::vector<Effect>& effects() const noexcept { return effects_; }
  std::size_t outcome_of(std::size_t effect) const { return outcome_of_[effect]; }

  /// Outcome probabilities for a raw state vector; `out` has outcome_count().
  void probabilities(std::span<const cplx> psi, std::span<double> out) const;

 private:
  Field field_;
  std::size_t dim_ = 0;
  std::size_t outcomes_ = 0;
  std::vector<Effect> effects_;
  std::vector<std::size_t> outcome_of_;
  std::vector<cplx> directions_;  // effect-major, conjugated-ready
};

/// Born rule p_k = w_k |<v_k|psi>|^2, pooled by outcome.
/// Throws FieldMismatch or DimensionMismatch.
std::vector<double> outcome_probabilities(const PureState& state, const Measurement& meas);

/// (seed, stream_id) names one reproducible random stream.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream; used for shards, bootstrap resamples, measurement tasks.
  SeedSpec derive(std::uint64_t child) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
Rng make_rng(const SeedSpec& seed);

/// Uniform double in the open interval (0, 1).
double uniform_open(Rng& rng);

}  // namespace scrooge
