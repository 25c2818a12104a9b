#include "scrooge/dicechannel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "scrooge/sampling.hpp"

namespace scrooge {

namespace {

// Refuse lattices that would not fit comfortably in memory.
constexpr double kMaxSignals = 5e7;

double region_volume(std::span<const double> axes) {
  const auto d = static_cast<double>(axes.size());
  double v = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) / std::exp2(d);
  for (double s : axes) v *= s;
  return v;
}

/// Depth-first walk over cell centres; `emit` sees each interior point.
template <class Emit>
void walk_lattice(std::span<const double> axes, double h, std::vector<double>& alpha, std::size_t dim, double budget,
                  Emit&& emit) {
  if (dim == axes.size()) {
    emit(alpha);
    return;
  }
  for (std::size_t i = 0;; ++i) {
    const double a = (static_cast<double>(i) + 0.5) * h;
    const double q = a * a / (axes[dim] * axes[dim]);
    if (q > budget) break;
    alpha[dim] = a;
    walk_lattice(axes, h, alpha, dim + 1, budget - q, emit);
  }
}

std::vector<double> uniform_region_point(std::span<const double> axes, Rng& rng) {
  std::vector<double> a(axes.size());
  for (;;) {
    double q = 0.0;
    for (std::size_t j = 0; j < axes.size(); ++j) {
      a[j] = axes[j] * uniform_open(rng);
      q += a[j] * a[j] / (axes[j] * axes[j]);
    }
    if (q <= 1.0) return a;
  }
}

}  // namespace

Spectrum ChannelConfig::spectrum() const {
  validate();
  return Spectrum(bounds);
}

void ChannelConfig::validate() const {
  const std::size_t minimum = mode == DieMode::PairedDie ? 1 : 2;
  if (bounds.size() < minimum || outcomes() < 2) fail(Errc::DimensionTooSmall, "die needs at least two outcomes");
  for (double b : bounds) {
    if (!(b > 0.0) || !std::isfinite(b)) fail(Errc::InvalidArgument, "bounds must be positive and finite");
  }
  if (!(d_min > 0.0) || !std::isfinite(d_min)) fail(Errc::InvalidArgument, "d_min must be positive");
}

double DieSignal::total_mean() const {
  double s = 0.0;
  for (double a : alpha) s += a * a;
  return s;
}

SignalSet::SignalSet(std::span<const DieSignal> signals) {
  if (signals.empty()) return;
  outcomes = signals.front().alpha.size();
  alpha.reserve(outcomes * signals.size());
  for (const auto& s : signals) {
    if (s.alpha.size() != outcomes) fail(Errc::DimensionMismatch, "signals differ in outcome count");
    alpha.insert(alpha.end(), s.alpha.begin(), s.alpha.end());
  }
}

double SignalSet::total_mean(std::size_t i) const {
  double s = 0.0;
  for (double a : at(i)) s += a * a;
  return s;
}

std::vector<DieSignal> SignalSet::to_signals() const {
  std::vector<DieSignal> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto a = at(i);
    out.push_back(DieSignal{{a.begin(), a.end()}});
  }
  return out;
}

std::vector<double> semi_axes(const ChannelConfig& config) {
  config.validate();
  const std::size_t n = config.bounds.size();
  std::vector<double> axes;
  axes.reserve(config.outcomes());
  for (double b : config.bounds) {
    if (config.mode == DieMode::RealDie) {
      axes.push_back(std::sqrt((static_cast<double>(n) + 2.0) * b));
    } else {
      const double s = std::sqrt((static_cast<double>(n) + 1.0) * b);
      axes.push_back(s);
      axes.push_back(s);
    }
  }
  return axes;
}

double fisher_separation(std::span<const double> m1, std::span<const double> m2) {
  if (m1.size() != m2.size()) fail(Errc::DimensionMismatch, "mean vectors differ in length");
  double s = 0.0;
  for (std::size_t j = 0; j < m1.size(); ++j) {
    if (!(m1[j] > 0.0) || !(m2[j] > 0.0)) fail(Errc::NonpositiveMean, "Fisher separation needs positive means");
    const double d = m1[j] - m2[j];
    s += d * d / (0.5 * (m1[j] + m2[j]));
  }
  return std::sqrt(s);
}

bool inside_region(std::span<const double> alpha, std::span<const double> axes, double slack) {
  if (alpha.size() != axes.size()) fail(Errc::DimensionMismatch, "signal and region differ in dimension");
  double q = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] < 0.0) return false;
    q += alpha[j] * alpha[j] / (axes[j] * axes[j]);
  }
  return q <= 1.0 + slack;
}

std::size_t lattice_count(const ChannelConfig& config) {
  const auto axes = semi_axes(config);
  const double h = 0.5 * config.d_min;
  const double estimate = region_volume(axes) / std::pow(h, static_cast<double>(axes.size()));
  if (estimate > kMaxSignals) fail(Errc::InvalidArgument, "d_min too small: lattice would be too large");
  std::size_t count = 0;
  std::vector<double> alpha(axes.size());
  walk_lattice(axes, h, alpha, 0, 1.0, [&](const std::vector<double>&) { ++count; });
  return count;
}

double dmin_for_signal_count(const ChannelConfig& config, std::size_t target) {
  if (target == 0) fail(Errc::InvalidArgument, "target signal count must be positive");
  ChannelConfig probe = config;
  probe.d_min = 1.0;
  const auto axes = semi_axes(probe);
  const double cell = region_volume(axes) / static_cast<double>(target);
  return 2.0 * std::pow(cell, 1.0 / static_cast<double>(axes.size()));
}

SignalSet place_signal_set(const ChannelConfig& config, const SeedSpec& seed) {
  const auto axes = semi_axes(config);
  const std::size_t count = lattice_count(config);
  if (count == 0) fail(Errc::EmptyRegion, "no lattice point fits inside the region; decrease d_min");
  SignalSet out;
  out.outcomes = axes.size();
  out.alpha.reserve(count * axes.size());
  if (config.placement == Placement::Lattice) {
    std::vector<double> alpha(axes.size());
    walk_lattice(axes, 0.5 * config.d_min, alpha, 0, 1.0,
                 [&](const std::vector<double>& a) { out.alpha.insert(out.alpha.end(), a.begin(), a.end()); });
  } else {
    Rng rng = make_rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
      const auto a = uniform_region_point(axes, rng);
      out.alpha.insert(out.alpha.end(), a.begin(), a.end());
    }
  }
  return out;
}

std::vector<DieSignal> place_signals(const ChannelConfig& config, const SeedSpec& seed) {
  return place_signal_set(config, seed).to_signals();
}

MomentCheck region_moment_check(const ChannelConfig& config, std::size_t n_mc, const SeedSpec& seed) {
  if (n_mc < 2) fail(Errc::TooFewSamples, "moment check needs samples");
  const auto axes = semi_axes(config);
  const bool paired = config.mode == DieMode::PairedDie;
  const std::size_t k = config.bounds.size();
  std::vector<double> sum(k, 0.0), sum2(k, 0.0);
  Rng rng = make_rng(seed);
  for (std::size_t i = 0; i < n_mc; ++i) {
    const auto a = uniform_region_point(axes, rng);
    for (std::size_t j = 0; j < k; ++j) {
      const double m = paired ? a[2 * j] * a[2 * j] + a[2 * j + 1] * a[2 * j + 1] : a[j] * a[j];
      sum[j] += m;
      sum2[j] += m * m;
    }
  }
  MomentCheck r;
  r.passed = true;
  const auto n = static_cast<double>(n_mc);
  for (std::size_t j = 0; j < k; ++j) {
    const double mean = sum[j] / n;
    const double var = std::max(0.0, (sum2[j] / n - mean * mean) * n / (n - 1.0));
    const double se = std::sqrt(var / n);
    r.mean.push_back(mean);
    r.std_error.push_back(se);
    r.target.push_back(config.bounds[j]);
    const double z = std::abs(mean - config.bounds[j]) / se;
    r.max_z = std::max(r.max_z, z);
    if (!(z < 3.0)) r.passed = false;
  }
  return r;
}

RollRecord RollLog::record(std::size_t r) const {
  RollRecord rec;
  rec.signal_index = signal.at(r);
  rec.counts.assign(counts.begin() + static_cast<std::ptrdiff_t>(r * outcomes),
                    counts.begin() + static_cast<std::ptrdiff_t>((r + 1) * outcomes));
  return rec;
}

std::uint64_t RollLog::total(std::size_t r) const {
  std::uint64_t t = 0;
  for (std::size_t j = 0; j < outcomes; ++j) t += counts[r * outcomes + j];
  return t;
}

RollLog roll_dice(const SignalSet& signals, std::size_t rounds, const SeedSpec& seed, Parallelism par) {
  if (signals.size() == 0) fail(Errc::EmptyRegion, "no signals to roll");
  const std::size_t k = signals.outcomes;
  RollLog log;
  log.outcomes = k;
  log.signal.resize(rounds);
  log.counts.resize(rounds * k);
  const std::size_t shards = (rounds + kShardSize - 1) / kShardSize;
  parallel_for(shards, par, [&](std::size_t s) {
    Rng rng = make_rng(seed.derive(s));
    std::uniform_int_distribution<std::size_t> pick(0, signals.size() - 1);
    const std::size_t end = std::min(rounds, (s + 1) * kShardSize);
    for (std::size_t r = s * kShardSize; r < end; ++r) {
      const std::size_t idx = pick(rng);
      const auto alpha = signals.at(idx);
      log.signal[r] = static_cast<std::uint32_t>(idx);
      for (std::size_t j = 0; j < k; ++j) {
        const double mean = alpha[j] * alpha[j];
        log.counts[r * k + j] = mean > 0.0 ? std::poisson_distribution<std::uint32_t>(mean)(rng) : 0u;
      }
    }
  });
  return log;
}

RollLog roll_dice(std::span<const DieSignal> signals, std::size_t rounds, const SeedSpec& seed, Parallelism par) {
  return roll_dice(SignalSet(signals), rounds, seed, par);
}

double InducedDensity::total_weight() const {
  double t = 0.0;
  for (double w : weight) t += w;
  return t;
}

std::vector<double> InducedDensity::histogram(const SimplexBins& bins) const {
  std::vector<double> h(bins.count(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    h[bins.index(points[i])] += weight[i];
    total += weight[i];
  }
  if (total > 0.0) {
    for (double& v : h) v /= total;
  }
  return h;
}

FitReport InducedDensity::fit(const SimplexDensity& density, Binning bins) const {
  return goodness_of_fit(points, weight, weight_sq, rounds, density, bins);
}

InducedDensity induced_density(const SignalSet& signals, const RollLog& rolls, RollWeighting weighting) {
  if (rolls.rounds() < 1000) fail(Errc::TooFewSamples, "induced density needs at least 1000 rounds");
  if (rolls.outcomes != signals.outcomes) fail(Errc::DimensionMismatch, "rolls and signals differ in outcome count");
  // Sort rounds by signal so each signal's weights are summed in one place;
  // memory stays proportional to the rounds, not the constellation.
  std::vector<std::pair<std::uint32_t, double>> per_round(rolls.rounds());
  for (std::size_t r = 0; r < rolls.rounds(); ++r) {
    const std::size_t idx = rolls.signal[r];
    if (idx >= signals.size()) fail(Errc::InvalidArgument, "roll refers to an unknown signal");
    const double v = weighting == RollWeighting::Realized ? static_cast<double>(rolls.total(r))
                                                          : signals.total_mean(idx);
    per_round[r] = {rolls.signal[r], v};
  }
  std::stable_sort(per_round.begin(), per_round.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  InducedDensity out;
  out.rounds = rolls.rounds();
  out.weighting = weighting;
  for (std::size_t i = 0; i < per_round.size();) {
    const std::uint32_t idx = per_round[i].first;
    double w = 0.0, w2 = 0.0;
    for (; i < per_round.size() && per_round[i].first == idx; ++i) {
      w += per_round[i].second;
      w2 += per_round[i].second * per_round[i].second;
    }
    if (!(w > 0.0)) continue;
    const auto alpha = signals.at(idx);
    const double m = signals.total_mean(idx);
    std::vector<double> x(alpha.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = alpha[j] * alpha[j] / m;
    out.points.push_back(make_simplex_point(std::move(x)));
    out.weight.push_back(w);
    out.weight_sq.push_back(w2);
  }
  return out;
}

InducedDensity induced_density(std::span<const DieSignal> signals, const RollLog& rolls, RollWeighting weighting) {
  return induced_density(SignalSet(signals), rolls, weighting);
}

double alpha_max(const SimplexPoint& x, const ChannelConfig& config) {
  const auto axes = semi_axes(config);
  if (x.size() != axes.size()) fail(Errc::DimensionMismatch, "point and die differ in outcome count");
  double s = 0.0;
  for (std::size_t j = 0; j < axes.size(); ++j) s += x[j] / (axes[j] * axes[j]);
  if (!(s > 0.0) || !std::isfinite(s)) fail(Errc::BoundaryDivergence, "ray does not leave the region");
  return 1.0 / std::sqrt(s);
}

SimplexPoint ab_blind_marginalize(const SimplexPoint& xab) {
  if (xab.size() % 2 != 0) fail(Errc::OddDimension, "paired point needs an even number of coordinates");
  std::vector<double> x(xab.size() / 2);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = xab[2 * j] + xab[2 * j + 1];
  return make_simplex_point(std::move(x));
}

std::vector<SimplexPoint> ab_blind_marginalize(std::span<const SimplexPoint> xab) {
  std::vector<SimplexPoint> out;
  out.reserve(xab.size());
  for (const auto& p : xab) out.push_back(ab_blind_marginalize(p));
  return out;
}

InducedDensity ab_blind_marginalize(const InducedDensity& ab) {
  InducedDensity out = ab;
  out.points = ab_blind_marginalize(std::span<const SimplexPoint>(ab.points));
  return out;
}

void write_rolls_csv(std::ostream& out, const RollLog& rolls) {
  out << "signal_index";
  for (std::size_t j = 1; j <= rolls.outcomes; ++j) out << ",N_" << j;
  out << '\n';
  for (std::size_t r = 0; r < rolls.rounds(); ++r) {
    out << rolls.signal[r];
    for (std::size_t j = 0; j < rolls.outcomes; ++j) out << ',' << rolls.counts[r * rolls.outcomes + j];
    out << '\n';
  }
  if (!out) fail(Errc::IoError, "failed writing roll CSV");
}

RollLog read_rolls_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::IoError, "empty roll CSV");
  RollLog log;
  log.outcomes = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (log.outcomes == 0) fail(Errc::IoError, "roll CSV header has no count columns");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<unsigned long> v;
    while (std::getline(row, cell, ',')) {
      try {
        v.push_back(std::stoul(cell));
      } catch (const std::exception&) {
        fail(Errc::IoError, "bad roll CSV cell: " + cell);
      }
    }
    if (v.size() != log.outcomes + 1) fail(Errc::IoError, "roll CSV row has the wrong number of columns");
    log.signal.push_back(static_cast<std::uint32_t>(v[0]));
    for (std::size_t j = 1; j < v.size(); ++j) log.counts.push_back(static_cast<std::uint32_t>(v[j]));
  }
  return log;
}

}  // namespace scrooge
