#include "scrooge/distortion.hpp"

#include <cmath>

namespace scrooge {

namespace {

void require_positive(const Spectrum& spec) {
  if (!spec.strictly_positive()) fail(Errc::DegenerateSpectrum, "distortion needs lambda_j > 0");
}

void check_size(const SimplexPoint& p, const Spectrum& spec) {
  if (p.size() != spec.size()) fail(Errc::DimensionMismatch, "point and spectrum dimensions differ");
}

}  // namespace

DiscreteEnsemble::DiscreteEnsemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
  if (members_.empty()) fail(Errc::InvalidArgument, "empty ensemble");
  double sum = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) fail(Errc::NegativeCoordinate, "ensemble weight < 0");
    if (m.state.size() != members_.front().state.size()) fail(Errc::DimensionMismatch, "ensemble dimensions differ");
    if (m.state.field() != members_.front().state.field()) fail(Errc::FieldMismatch, "ensemble fields differ");
    sum += m.weight;
  }
  if (std::abs(sum - 1.0) > tol::simplex_input) fail(Errc::NotNormalized, "ensemble weights must sum to 1");
  for (auto& m : members_) m.weight /= sum;
}

DiscreteEnsemble DiscreteEnsemble::eigenstates(const Spectrum& spec, Field field) {
  std::vector<EnsembleMember> members;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    members.push_back({PureState::basis(field, spec.size(), j), spec[j]});
  }
  return DiscreteEnsemble(std::move(members));
}

Eigen::MatrixXcd DiscreteEnsemble::density_matrix() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd v(n);
  for (const auto& m : members_) {
    const auto vec = m.state.vector();
    for (Eigen::Index j = 0; j < n; ++j) v[j] = vec[static_cast<std::size_t>(j)];
    rho.noalias() += m.weight * v * v.adjoint();
  }
  return rho;
}

PureState distort_state(const PureState& state, const Spectrum& spec) {
  if (state.size() != spec.size()) fail(Errc::DimensionMismatch, "state and spectrum dimensions differ");
  std::vector<double> a(state.size());
  double norm2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    a[j] = std::sqrt(spec[j]) * state.amplitudes()[j];
    norm2 += a[j] * a[j];
  }
  if (!(norm2 > 0.0)) fail(Errc::DegenerateSpectrum, "state lies in the kernel of rho");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : a) v *= inv;
  const auto ph = state.phases();
  return PureState::from_polar(state.field(), std::move(a), std::vector<double>(ph.begin(), ph.end()));
}

DiscreteEnsemble distort_discrete(const DiscreteEnsemble& ens, const Spectrum& spec) {
  require_positive(spec);
  const std::size_t n = spec.size();
  if (ens.dimension() != n) fail(Errc::DimensionMismatch, "ensemble and spectrum dimensions differ");
  const Eigen::MatrixXcd target =
      Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) / static_cast<double>(n);
  if ((ens.density_matrix() - target).norm() > tol::completeness) {
    fail(Errc::NotCompletelyMixed, "ensemble density matrix is not I/n");
  }
  std::vector<EnsembleMember> out;
  out.reserve(ens.size());
  for (const auto& m : ens.members()) {
    double expect = 0.0;
    for (std::size_t j = 0; j < n; ++j) expect += spec[j] * m.state.amplitudes()[j] * m.state.amplitudes()[j];
    out.push_back({distort_state(m.state, spec), static_cast<double>(n) * m.weight * expect});
  }
  return DiscreteEnsemble(std::move(out));
}

SimplexPoint distort_coords(const SimplexPoint& y, const Spectrum& spec) {
  require_positive(spec);
  check_size(y, spec);
  std::vector<double> x(y.size());
  double denom = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = spec[j] * y[j];
    denom += x[j];
  }
  for (double& v : x) v /= denom;
  return make_simplex_point(std::move(x));
}

SimplexPoint distort_coords_inverse(const SimplexPoint& x, const Spectrum& spec) {
  require_positive(spec);
  check_size(x, spec);
  std::vector<double> y(x.size());
  double denom = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    y[j] = x[j] / spec[j];
    denom += y[j];
  }
  for (double& v : y) v /= denom;
  return make_simplex_point(std::move(y));
}

double log_distort_jacobian(const SimplexPoint& x, const Spectrum& spec) {
  require_positive(spec);
  check_size(x, spec);
  double log_prod = 0.0, s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    log_prod += std::log(spec[j]);
    s += x[j] / spec[j];
  }
  return -log_prod - static_cast<double>(x.size()) * std::log(s);
}

double distort_jacobian(const SimplexPoint& x, const Spectrum& spec) {
  return std::exp(log_distort_jacobian(x, spec));
}

double expectation_factor(const SimplexPoint& y, const Spectrum& spec) {
  check_size(y, spec);
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) s += spec[j] * y[j];
  return s;
}

}  // namespace scrooge
