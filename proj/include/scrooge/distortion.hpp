#pragma once

#include <Eigen/Dense>
#include <vector>

#include "scrooge/core.hpp"

namespace scrooge {

struct EnsembleMember {
  PureState state;
  double weight = 0.0;
};

/// Finite pure-state ensemble; weights are non-negative and sum to one.
class DiscreteEnsemble {
 public:
  explicit DiscreteEnsemble(std::vector<EnsembleMember> members);

  /// Eigenstates of diag(spec) weighted by the eigenvalues.
  static DiscreteEnsemble eigenstates(const Spectrum& spec, Field field);

  const std::vector<EnsembleMember>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t dimension() const noexcept { return members_.front().state.size(); }
  Field field() const noexcept { return members_.front().state.field(); }

  /// sum_i p_i |psi_i><psi_i|
  Eigen::MatrixXcd density_matrix() const;

 private:
  std::vector<EnsembleMember> members_;
};

/// Maps an ensemble with density matrix I/n to one with density matrix
/// diag(spec): states go to sqrt(rho)|psi>/norm and weights to n p <psi|rho|psi>.
/// Throws NotCompletelyMixed (checked at 1e-9) or DegenerateSpectrum.
DiscreteEnsemble distort_discrete(const DiscreteEnsemble& ens, const Spectrum& spec);

/// x_j = lambda_j y_j / sum_k lambda_k y_k
SimplexPoint distort_coords(const SimplexPoint& y, const Spectrum& spec);

/// y_j = (x_j / lambda_j) / sum_k x_k / lambda_k
SimplexPoint distort_coords_inverse(const SimplexPoint& x, const Spectrum& spec);

/// J(y/x) = 1 / (prod lambda) * (sum x_j / lambda_j)^{-n}
double distort_jacobian(const SimplexPoint& x, const Spectrum& spec);
double log_distort_jacobian(const SimplexPoint& x, const Spectrum& spec);

/// <y|rho|y> = sum_j lambda_j y_j
double expectation_factor(const SimplexPoint& y, const Spectrum& spec);

/// Applies sqrt(rho) to a pure state and renormalizes; phases are unchanged.
PureState distort_state(const PureState& state, const Spectrum& spec);

}  // namespace scrooge
