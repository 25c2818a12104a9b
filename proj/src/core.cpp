#include "scrooge/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <string>

#include "scrooge/parallel.hpp"

namespace scrooge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

// Index of the last component with nonzero amplitude; this component
// carries the gauge when a_n happens to vanish.
std::size_t gauge_index(std::span<const double> amplitudes) {
  for (std::size_t j = amplitudes.size(); j-- > 0;) {
    if (amplitudes[j] > 0.0) return j;
  }
  return amplitudes.size() - 1;
}

void check_phases_real(std::span<const double> phases) {
  for (double t : phases) {
    const double w = wrap_phase(t);
    const bool zero = w < tol::construction || kTwoPi - w < tol::construction;
    const bool pi = std::abs(w - std::numbers::pi) < tol::construction;
    if (!zero && !pi) fail(Errc::InvalidArgument, "real-field phases must be 0 or pi");
  }
}

}  // namespace

std::string_view to_string(Field field) noexcept {
  return field == Field::Real ? "real" : "complex";
}

Field parse_field(std::string_view text) {
  if (text == "real") return Field::Real;
  if (text == "complex") return Field::Complex;
  fail(Errc::InvalidArgument, "unknown field '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.size() < 2) fail(Errc::DimensionTooSmall, "spectrum needs n >= 2");
  double sum = 0.0;
  for (double l : lambdas_) {
    if (!std::isfinite(l)) fail(Errc::InvalidArgument, "spectrum entries must be finite");
    if (l < 0.0) fail(Errc::NegativeCoordinate, "spectrum entries must be >= 0");
    sum += l;
  }
  if (!(sum > 0.0)) fail(Errc::NotNormalized, "spectrum sums to zero");
  for (double& l : lambdas_) l /= sum;
}

Spectrum Spectrum::uniform(std::size_t n) { return Spectrum(std::vector<double>(n, 1.0)); }

double Spectrum::max() const noexcept { return *std::max_element(lambdas_.begin(), lambdas_.end()); }

bool Spectrum::strictly_positive() const noexcept {
  return std::all_of(lambdas_.begin(), lambdas_.end(), [](double l) { return l > 0.0; });
}

// ---------------------------------------------------------------------------
// SimplexPoint

SimplexPoint make_simplex_point(std::vector<double> coords) {
  const std::size_t n = coords.size();
  if (n < 2) fail(Errc::DimensionTooSmall, "simplex point needs n >= 2");
  double sum = 0.0;
  for (double& c : coords) {
    if (!std::isfinite(c)) fail(Errc::InvalidArgument, "simplex coordinates must be finite");
    if (c < -tol::construction) fail(Errc::NegativeCoordinate, "simplex coordinate below zero");
    if (c < 0.0) c = 0.0;
    sum += c;
  }
  if (std::abs(sum - 1.0) > tol::simplex_input) {
    fail(Errc::NotNormalized, "simplex coordinates sum to " + std::to_string(sum));
  }
  double head = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    coords[j] /= sum;
    head += coords[j];
  }
  coords[n - 1] = std::max(0.0, 1.0 - head);
  return SimplexPoint(std::move(coords));
}

// ---------------------------------------------------------------------------
// PureState

PureState PureState::from_polar(Field field, std::vector<double> amplitudes,
                                std::vector<double> phases) {
  const std::size_t n = amplitudes.size();
  if (n < 2) fail(Errc::DimensionTooSmall, "pure state needs n >= 2");
  if (phases.size() != n) fail(Errc::DimensionMismatch, "amplitudes and phases differ in length");
  double norm2 = 0.0;
  for (double a : amplitudes) {
    if (!std::isfinite(a)) fail(Errc::InvalidArgument, "amplitudes must be finite");
    if (a < 0.0) fail(Errc::NegativeCoordinate, "amplitudes must be non-negative");
    norm2 += a * a;
  }
  if (std::abs(norm2 - 1.0) > tol::simplex_input) fail(Errc::NotNormalized, "sum of a_j^2 must be 1");
  const double scale = 1.0 / std::sqrt(norm2);
  for (double& a : amplitudes) a *= scale;
  if (field == Field::Real) check_phases_real(phases);

  const double gauge = phases[gauge_index(amplitudes)];
  for (double& t : phases) t = wrap_phase(t - gauge);
  if (field == Field::Real) {
    for (double& t : phases) t = std::abs(t - std::numbers::pi) < 1e-6 ? std::numbers::pi : 0.0;
  }
  phases[n - 1] = 0.0;
  return PureState(field, std::move(amplitudes), std::move(phases));
}

PureState PureState::from_vector(Field field, std::span<const cplx> vec) {
  const std::size_t n = vec.size();
  if (n < 2) fail(Errc::DimensionTooSmall, "pure state needs n >= 2");
  double norm2 = 0.0;
  for (const cplx& c : vec) norm2 += std::norm(c);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) fail(Errc::InvalidArgument, "state vector has zero norm");
  const double inv = 1.0 / std::sqrt(norm2);

  std::vector<double> amplitudes(n), phases(n);
  for (std::size_t j = 0; j < n; ++j) amplitudes[j] = std::abs(vec[j]) * inv;

  if (field == Field::Real) {
    for (const cplx& c : vec) {
      if (std::abs(c.imag()) > tol::construction * std::sqrt(norm2)) {
        fail(Errc::FieldMismatch, "real-field state with imaginary component");
      }
    }
    const double gauge = vec[gauge_index(amplitudes)].real() < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      phases[j] = gauge * vec[j].real() < 0.0 ? std::numbers::pi : 0.0;
    }
  } else {
    // c_j = a_j e^{-i theta_j}  =>  theta_j = -arg(c_j)
    const double gauge = -std::arg(vec[gauge_index(amplitudes)]);
    for (std::size_t j = 0; j < n; ++j) {
      phases[j] = amplitudes[j] > 0.0 ? wrap_phase(-std::arg(vec[j]) - gauge) : 0.0;
    }
  }
  phases[n - 1] = 0.0;
  return PureState(field, std::move(amplitudes), std::move(phases));
}

PureState PureState::basis(Field field, std::size_t n, std::size_t j) {
  if (j >= n) fail(Errc::DimensionMismatch, "basis index out of range");
  std::vector<double> a(n, 0.0);
  a[j] = 1.0;
  return from_polar(field, std::move(a), std::vector<double>(n, 0.0));
}

std::vector<cplx> PureState::vector() const {
  std::vector<cplx> out(size());
  write_vector(out);
  return out;
}

void PureState::write_vector(std::span<cplx> out) const {
  for (std::size_t j = 0; j < amplitudes_.size(); ++j) {
    out[j] = std::polar(amplitudes_[j], -phases_[j]);
  }
}

SimplexPoint state_probabilities(const PureState& state) {
  std::vector<double> x(state.size());
  std::transform(state.amplitudes().begin(), state.amplitudes().end(), x.begin(),
                 [](double a) { return a * a; });
  return make_simplex_point(std::move(x));
}

// ---------------------------------------------------------------------------
// Measurement

Measurement::Measurement(Field field, std::vector<Effect> effects,
                         std::vector<std::size_t> outcome_of)
    : field_(field), effects_(std::move(effects)), outcome_of_(std::move(outcome_of)) {
  if (effects_.empty()) fail(Errc::InvalidArgument, "measurement without effects");
  dim_ = effects_.front().direction.size();
  for (const Effect& e : effects_) {
    if (e.direction.field() != field_) fail(Errc::FieldMismatch, "effect field differs from measurement");
    if (e.direction.size() != dim_) fail(Errc::DimensionMismatch, "effects differ in dimension");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) fail(Errc::InvalidArgument, "effect weight must be >= 0");
  }

  if (outcome_of_.empty()) {
    outcome_of_.resize(effects_.size());
    std::iota(outcome_of_.begin(), outcome_of_.end(), std::size_t{0});
  }
  if (outcome_of_.size() != effects_.size()) fail(Errc::DimensionMismatch, "outcome map size");
  outcomes_ = *std::max_element(outcome_of_.begin(), outcome_of_.end()) + 1;
  std::vector<bool> used(outcomes_, false);
  for (std::size_t o : outcome_of_) used[o] = true;
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    fail(Errc::InvalidArgument, "outcome map leaves an outcome without effects");
  }

  directions_.resize(effects_.size() * dim_);
  for (std::size_t k = 0; k < effects_.size(); ++k) {
    effects_[k].direction.write_vector(std::span(directions_).subspan(k * dim_, dim_));
  }

  // Completeness: sum_k w_k |v_k><v_k| = I in Frobenius norm.
  double frob2 = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < effects_.size(); ++k) {
        const cplx* v = &directions_[k * dim_];
        s += effects_[k].weight * v[r] * std::conj(v[c]);
      }
      if (r == c) s -= 1.0;
      frob2 += std::norm(s);
    }
  }
  if (std::sqrt(frob2) > tol::completeness) {
    fail(Errc::NotComplete, "effects do not sum to the identity");
  }
}

Measurement Measurement::from_basis(Field field, const std::vector<std::vector<cplx>>& columns) {
  std::vector<Effect> effects;
  effects.reserve(columns.size());
  for (const auto& col : columns) effects.push_back({1.0, PureState::from_vector(field, col)});
  return Measurement(field, std::move(effects));
}

Measurement Measurement::eigenbasis(std::size_t n, Field field) {
  std::vector<Effect> effects;
  for (std::size_t j = 0; j < n; ++j) effects.push_back({1.0, PureState::basis(field, n, j)});
  return Measurement(field, std::move(effects));
}

Measurement Measurement::trivial(std::size_t n, Field field) {
  std::vector<Effect> effects;
  for (std::size_t j = 0; j < n; ++j) effects.push_back({1.0, PureState::basis(field, n, j)});
  return Measurement(field, std::move(effects), std::vector<std::size_t>(n, 0));
}

void Measurement::probabilities(std::span<const cplx> psi, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < effects_.size(); ++k) {
    const cplx* v = &directions_[k * dim_];
    cplx amp = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) amp += std::conj(v[j]) * psi[j];
    out[outcome_of_[k]] += effects_[k].weight * std::norm(amp);
  }
}

std::vector<double> outcome_probabilities(const PureState& state, const Measurement& meas) {
  if (state.field() != meas.field()) fail(Errc::FieldMismatch, "state and measurement fields differ");
  if (state.size() != meas.dimension()) fail(Errc::DimensionMismatch, "state and measurement dimensions differ");
  std::vector<double> p(meas.outcome_count());
  meas.probabilities(state.vector(), p);
  return p;
}

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::derive(std::uint64_t child) const noexcept {
  return {seed, splitmix64(splitmix64(stream_id) ^ (child * 0xD1B54A32D192ED03ULL + 1))};
}

Rng make_rng(const SeedSpec& seed) {
  const std::uint64_t key = splitmix64(seed.seed ^ splitmix64(seed.stream_id ^ 0xA0761D6478BD642FULL));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.stream_id)};
  return Rng(seq);
}

double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Parallelism

unsigned default_threads() {
  if (const char* env = std::getenv("SCROOGE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

unsigned Parallelism::resolved() const { return threads > 0 ? threads : default_threads(); }

}  // namespace scrooge
