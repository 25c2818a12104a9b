#include "scrooge/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "scrooge/distortion.hpp"

namespace scrooge {

namespace {

std::size_t shard_count(std::size_t count) { return (count + kShardSize - 1) / kShardSize; }

std::size_t shard_target(std::size_t count, std::size_t shard) {
  return std::min(kShardSize, count - shard * kShardSize);
}

struct Shard {
  std::vector<PureState> states;
  std::vector<SimplexPoint> points;
  std::vector<double> weights;
  std::size_t attempts = 0;
};

SampleBatch merge(Field field, std::size_t n, const SeedSpec& seed, std::vector<Shard>& shards, bool weighted) {
  SampleBatch batch;
  batch.field = field;
  batch.dimension = n;
  batch.seed_spec = seed;
  std::size_t total = 0;
  for (const auto& s : shards) total += s.states.size();
  batch.states.reserve(total);
  batch.points.reserve(total);
  if (weighted) batch.weights.reserve(total);
  for (auto& s : shards) {
    std::move(s.states.begin(), s.states.end(), std::back_inserter(batch.states));
    std::move(s.points.begin(), s.points.end(), std::back_inserter(batch.points));
    if (weighted) batch.weights.insert(batch.weights.end(), s.weights.begin(), s.weights.end());
    batch.attempts += s.attempts;
  }
  return batch;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

double SampleBatch::acceptance_rate() const {
  return attempts == 0 ? 0.0 : static_cast<double>(size()) / static_cast<double>(attempts);
}

PureState sample_sphere_state(std::size_t n, Field field, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& c : v) {
    const double re = gauss(rng);
    const double im = field == Field::Complex ? gauss(rng) : 0.0;
    c = {re, im};
  }
  return PureState::from_vector(field, v);
}

SampleBatch sample_uniform_sphere(std::size_t n, Field field, std::size_t count, const SeedSpec& seed,
                                  Parallelism par) {
  if (n < 2) fail(Errc::DimensionTooSmall, "n >= 2 required");
  if (count < 1) fail(Errc::InvalidArgument, "count >= 1 required");
  std::vector<Shard> shards(shard_count(count));
  parallel_for(shards.size(), par, [&](std::size_t s) {
    Rng rng = make_rng(seed.derive(s));
    const std::size_t target = shard_target(count, s);
    Shard& out = shards[s];
    out.states.reserve(target);
    out.points.reserve(target);
    for (std::size_t i = 0; i < target; ++i) {
      out.states.push_back(sample_sphere_state(n, field, rng));
      out.points.push_back(state_probabilities(out.states.back()));
    }
    out.attempts = target;
  });
  return merge(field, n, seed, shards, false);
}

SampleBatch sample_scrooge(const Spectrum& spec, Field field, std::size_t count, SamplingMode mode,
                           const SeedSpec& seed, Parallelism par) {
  if (!spec.strictly_positive()) fail(Errc::DegenerateSpectrum, "Scrooge sampling needs lambda_j > 0");
  if (count < 1) fail(Errc::InvalidArgument, "count >= 1 required");
  const std::size_t n = spec.size();
  const double lambda_max = spec.max();
  std::vector<Shard> shards(shard_count(count));
  parallel_for(shards.size(), par, [&](std::size_t s) {
    Rng rng = make_rng(seed.derive(s));
    const std::size_t target = shard_target(count, s);
    Shard& out = shards[s];
    out.states.reserve(target);
    out.points.reserve(target);
    while (out.states.size() < target) {
      PureState y = sample_sphere_state(n, field, rng);
      ++out.attempts;
      double expect = 0.0;
      for (std::size_t j = 0; j < n; ++j) expect += spec[j] * y.amplitudes()[j] * y.amplitudes()[j];
      if (mode == SamplingMode::Rejection) {
        if (uniform_open(rng) * lambda_max >= expect) continue;
      } else {
        out.weights.push_back(static_cast<double>(n) * expect);
      }
      out.states.push_back(distort_state(y, spec));
      out.points.push_back(state_probabilities(out.states.back()));
    }
  });
  return merge(field, n, seed, shards, mode == SamplingMode::Importance);
}

void write_batch_csv(std::ostream& out, const SampleBatch& batch) {
  out << "field,n,seed,stream\n";
  out << to_string(batch.field) << ',' << batch.dimension << ',' << batch.seed_spec.seed << ','
      << batch.seed_spec.stream_id << '\n';
  char buf[32];
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& x = batch.points[i];
    const auto phases = batch.states[i].phases();
    std::string row;
    for (double v : x) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      row += buf;
    }
    for (std::size_t j = 0; j + 1 < batch.dimension; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", phases[j]);
      row += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", batch.weight(i));
    row += buf;
    out << row;
  }
}

SampleBatch read_batch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "field,n,seed,stream") fail(Errc::IoError, "missing batch header");
  if (!std::getline(in, line)) fail(Errc::IoError, "missing batch metadata");
  const auto meta = split_csv(line);
  if (meta.size() != 4) fail(Errc::IoError, "malformed batch metadata");
  SampleBatch batch;
  batch.field = parse_field(meta[0]);
  batch.dimension = std::stoul(meta[1]);
  batch.seed_spec = {std::stoull(meta[2]), std::stoull(meta[3])};
  const std::size_t n = batch.dimension;
  if (n < 2) fail(Errc::IoError, "batch dimension < 2");
  bool any_weight = false;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2 * n) fail(Errc::IoError, "batch row has wrong column count");
    std::vector<double> x(n), amp(n), phase(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = std::stod(cells[j]);
      amp[j] = std::sqrt(std::max(0.0, x[j]));
    }
    for (std::size_t j = 0; j + 1 < n; ++j) phase[j] = std::stod(cells[n + j]);
    const double w = std::stod(cells[2 * n - 1]);
    any_weight = any_weight || w != 1.0;
    weights.push_back(w);
    batch.states.push_back(PureState::from_polar(batch.field, std::move(amp), std::move(phase)));
    batch.points.push_back(state_probabilities(batch.states.back()));
  }
  if (any_weight) batch.weights = std::move(weights);
  batch.attempts = batch.size();
  return batch;
}

}  // namespace scrooge
