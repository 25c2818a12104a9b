#include "scrooge/infotheory.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "scrooge/densities.hpp"
#include "scrooge/quadrature.hpp"

namespace scrooge {

namespace {

constexpr std::size_t kMinSamples = 100;

double plogp_sum(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s;
}

/// Per-sample outcome distributions and their negative entropies.
struct Conditionals {
  std::size_t outcomes = 0;
  std::vector<double> p;  // sample-major
  std::vector<double> neg_entropy;
  std::vector<double> weight;
};

Conditionals conditionals(const SampleBatch& batch, const Measurement& meas) {
  if (batch.field != meas.field()) fail(Errc::FieldMismatch, "batch and measurement fields differ");
  if (batch.dimension != meas.dimension()) fail(Errc::DimensionMismatch, "batch and measurement dimensions differ");
  Conditionals c;
  c.outcomes = meas.outcome_count();
  const std::size_t n = batch.size();
  c.p.resize(n * c.outcomes);
  c.neg_entropy.resize(n);
  c.weight.resize(n);
  std::vector<cplx> psi(batch.dimension);
  for (std::size_t i = 0; i < n; ++i) {
    batch.states[i].write_vector(psi);
    const std::span<double> row(c.p.data() + i * c.outcomes, c.outcomes);
    meas.probabilities(psi, row);
    c.neg_entropy[i] = plogp_sum(row);
    c.weight[i] = batch.weight(i);
  }
  return c;
}

/// I = H(pbar) + mean_x sum_j p ln p over `count` indices; draw(t) yields
/// the t-th one.
template <class Draw>
double mi_value(const Conditionals& c, std::size_t count, Draw&& draw) {
  std::vector<double> pbar(c.outcomes, 0.0);
  double total = 0.0, inner = 0.0;
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t i = draw(t);
    const double w = c.weight[i];
    total += w;
    inner += w * c.neg_entropy[i];
    const double* row = c.p.data() + i * c.outcomes;
    for (std::size_t j = 0; j < c.outcomes; ++j) pbar[j] += w * row[j];
  }
  for (double& v : pbar) v /= total;
  return -plogp_sum(pbar) + inner / total;
}

/// Arbitrary orthonormal columns as a measurement, dropping imaginary
/// roundoff for the real field.
Measurement measurement_from_matrix(Field field, const Eigen::MatrixXcd& q) {
  const auto n = q.rows();
  std::vector<std::vector<cplx>> cols(static_cast<std::size_t>(n), std::vector<cplx>(static_cast<std::size_t>(n)));
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      cplx v = q(r, c);
      if (field == Field::Real) v = v.real();
      cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] = v;
    }
  }
  return Measurement::from_basis(field, cols);
}

}  // namespace

MIEstimate mutual_information(const SampleBatch& batch, const Measurement& meas, const SeedSpec& bootstrap,
                              std::size_t resamples, Parallelism par) {
  if (batch.size() < kMinSamples) fail(Errc::TooFewSamples, "mutual information needs at least 100 samples");
  const Conditionals c = conditionals(batch, meas);
  const std::size_t n = batch.size();
  MIEstimate est;
  est.samples_used = n;
  est.value = mi_value(c, n, [](std::size_t t) { return t; });
  if (resamples == 0) return est;

  std::vector<double> boot(resamples);
  parallel_for(resamples, par, [&](std::size_t r) {
    Rng rng = make_rng(bootstrap.derive(r));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    boot[r] = mi_value(c, n, [&](std::size_t) { return pick(rng); });
  });
  double m = 0.0;
  for (double v : boot) m += v;
  m /= static_cast<double>(resamples);
  double ss = 0.0;
  for (double v : boot) ss += (v - m) * (v - m);
  est.std_error = resamples > 1 ? std::sqrt(ss / static_cast<double>(resamples - 1)) : 0.0;
  return est;
}

double mutual_information_discrete(const DiscreteEnsemble& ens, const Measurement& meas) {
  if (ens.field() != meas.field()) fail(Errc::FieldMismatch, "ensemble and measurement fields differ");
  if (ens.dimension() != meas.dimension()) fail(Errc::DimensionMismatch, "ensemble and measurement dimensions differ");
  std::vector<double> pbar(meas.outcome_count(), 0.0), row(meas.outcome_count());
  double inner = 0.0;
  std::vector<cplx> psi(ens.dimension());
  for (const auto& m : ens.members()) {
    if (m.weight <= 0.0) continue;
    m.state.write_vector(psi);
    meas.probabilities(psi, row);
    inner += m.weight * plogp_sum(row);
    for (std::size_t j = 0; j < row.size(); ++j) pbar[j] += m.weight * row[j];
  }
  return -plogp_sum(pbar) + inner;
}

SampleBatch batch_from_ensemble(const DiscreteEnsemble& ens, std::size_t min_size) {
  std::size_t live = 0;
  for (const auto& m : ens.members()) live += m.weight > 0.0;
  const std::size_t reps = std::max<std::size_t>(1, (min_size + live - 1) / live);
  SampleBatch batch;
  batch.field = ens.field();
  batch.dimension = ens.dimension();
  for (std::size_t r = 0; r < reps; ++r) {
    for (const auto& m : ens.members()) {
      if (m.weight <= 0.0) continue;
      batch.states.push_back(m.state);
      batch.points.push_back(state_probabilities(m.state));
      batch.weights.push_back(m.weight / static_cast<double>(reps));
    }
  }
  batch.attempts = batch.size();
  return batch;
}

Measurement random_complete_measurement(std::size_t n, Field field, const SeedSpec& seed) {
  if (n < 2) fail(Errc::DimensionTooSmall, "n >= 2 required");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd z(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < m; ++r) {
      const double re = gauss(rng);
      z(r, c) = {re, field == Field::Complex ? gauss(rng) : 0.0};
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& packed = qr.matrixQR();
  for (Eigen::Index c = 0; c < m; ++c) {
    const cplx d = packed(c, c);
    if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
  }
  return measurement_from_matrix(field, q);
}

std::size_t haar_uniform_dimension(std::size_t n, Field) { return n * (n - 1); }

Measurement haar_basis_from_uniforms(std::size_t n, Field field, std::span<const double> u) {
  if (n < 2) fail(Errc::DimensionTooSmall, "n >= 2 required");
  if (u.size() < haar_uniform_dimension(n, field)) fail(Errc::DimensionMismatch, "too few uniforms for the basis");
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Identity(dim, dim);  // complement, column-wise
  Eigen::MatrixXcd out(dim, dim);
  std::size_t next = 0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index m = dim - k;
    Eigen::VectorXcd w(m);
    if (m == 1) {
      w[0] = 1.0;
    } else {
      double rest = 1.0;
      std::vector<double> mod2(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i + 1 < m; ++i) {
        const double v = u[next++];
        const double left = static_cast<double>(m - 1 - i);
        // Dirichlet(1,..,1) for complex, Dirichlet(1/2,..,1/2) for real amplitudes.
        const double b = field == Field::Complex ? 1.0 - std::pow(1.0 - v, 1.0 / left)
                                                 : boost::math::ibeta_inv(0.5, 0.5 * left, v);
        mod2[static_cast<std::size_t>(i)] = rest * b;
        rest -= rest * b;
      }
      mod2.back() = std::max(0.0, rest);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = std::sqrt(mod2[static_cast<std::size_t>(i)]);
        if (i + 1 == m) {
          w[i] = a;
        } else if (field == Field::Complex) {
          w[i] = std::polar(a, 2.0 * std::numbers::pi * u[next++]);
        } else {
          w[i] = u[next++] < 0.5 ? -a : a;
        }
      }
    }
    out.col(k) = basis * w;
    if (m > 1) {
      // Orthonormal completion of w inside the current complement.
      Eigen::MatrixXcd aug(m, m + 1);
      aug.col(0) = w;
      aug.rightCols(m) = Eigen::MatrixXcd::Identity(m, m);
      const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(aug);
      const Eigen::MatrixXcd q = qr.householderQ();
      basis = (basis * q.rightCols(m - 1)).eval();
    }
  }
  return measurement_from_matrix(field, out);
}

IndependenceReport measurement_independence_report(const SampleBatch& batch, const Spectrum& spec,
                                                   const std::vector<Measurement>& measurements,
                                                   const SeedSpec& seed, Parallelism par) {
  IndependenceReport r;
  r.spectrum.assign(spec.values().begin(), spec.values().end());
  r.field = batch.field;
  r.samples = batch.size();
  r.subentropy = subentropy(spec);
  r.entropy = von_neumann_entropy(spec);
  r.measurements.resize(measurements.size());
  parallel_for(measurements.size(), par, [&](std::size_t k) {
    const auto est = mutual_information(batch, measurements[k], seed.derive(k), kBootstrapResamples, Parallelism{1});
    r.measurements[k] = {est.value, est.std_error};
  });
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, max_se = 0.0;
  r.within_3se_of_q = true;
  for (const auto& m : r.measurements) {
    lo = std::min(lo, m.value);
    hi = std::max(hi, m.value);
    max_se = std::max(max_se, m.std_error);
    const double dev = std::abs(m.value - r.subentropy);
    const double z = m.std_error > 0.0 ? dev / m.std_error : (dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.max_deviation_se = std::max(r.max_deviation_se, z);
    r.within_3se_of_q = r.within_3se_of_q && dev < 3.0 * m.std_error;
  }
  r.spread = measurements.empty() ? 0.0 : hi - lo;
  r.spread_within_3se = r.spread < 3.0 * max_se;
  return r;
}

IndependenceReport measurement_independence_report(const Spectrum& spec, Field field, std::size_t n_meas,
                                                   std::size_t n_samples, const SeedSpec& seed, Parallelism par) {
  if (n_meas < 10) fail(Errc::InvalidArgument, "at least 10 measurements required");
  const SampleBatch batch = sample_scrooge(spec, field, n_samples, SamplingMode::Rejection, seed.derive(0), par);
  std::vector<Measurement> meas;
  meas.reserve(n_meas);
  for (std::size_t k = 0; k < n_meas; ++k) {
    meas.push_back(random_complete_measurement(spec.size(), field, seed.derive(1).derive(k)));
  }
  return measurement_independence_report(batch, spec, meas, seed.derive(2), par);
}

AverageReport average_mi_report(const AverageSource& source, const Spectrum& spec, std::size_t n_meas,
                                const SeedSpec& seed, Parallelism par) {
  if (n_meas < kAverageReplicates) fail(Errc::InvalidArgument, "at least 10 measurements required");
  const auto* ens = std::get_if<DiscreteEnsemble>(&source);
  const auto* batch = std::get_if<SampleBatch>(&source);
  const Field field = ens ? ens->field() : batch->field;
  const std::size_t n = ens ? ens->dimension() : batch->dimension;
  if (n != spec.size()) fail(Errc::DimensionMismatch, "source and spectrum dimensions differ");
  if (ens) {
    Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) target(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = spec[j];
    if ((ens->density_matrix() - target).norm() > 1e-6) {
      fail(Errc::DensityMismatch, "ensemble density matrix differs from diag(spectrum)");
    }
  }

  const std::size_t reps = kAverageReplicates;
  const std::size_t per = (n_meas + reps - 1) / reps;
  const std::size_t dim = haar_uniform_dimension(n, field);
  std::vector<double> values(reps * per);
  parallel_for(reps, par, [&](std::size_t rep) {
    Rng rng = make_rng(seed.derive(rep));
    std::vector<double> shift(dim), u(dim);
    for (double& v : shift) v = uniform_open(rng);
    ShiftedSobol sobol(dim, shift);
    for (std::size_t i = 0; i < per; ++i) {
      sobol.next(u);
      const Measurement meas = haar_basis_from_uniforms(n, field, u);
      values[rep * per + i] =
          ens ? mutual_information_discrete(*ens, meas) : mutual_information(*batch, meas, {}, 0, Parallelism{1}).value;
    }
  });

  AverageReport r;
  r.spectrum.assign(spec.values().begin(), spec.values().end());
  r.field = field;
  r.measurements = values.size();
  r.replicates = reps;
  std::vector<double> rep_mean(reps, 0.0);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    for (std::size_t i = 0; i < per; ++i) rep_mean[rep] += values[rep * per + i];
    rep_mean[rep] /= static_cast<double>(per);
    r.mean += rep_mean[rep];
  }
  r.mean /= static_cast<double>(reps);
  double ss = 0.0;
  for (double m : rep_mean) ss += (m - r.mean) * (m - r.mean);
  r.std_error = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
  r.subentropy = subentropy(spec);
  r.deviation = r.mean - r.subentropy;
  return r;
}

}  // namespace scrooge
