#pragma once

#include <cstddef>
#include <iosfwd>

#include "scrooge/core.hpp"
#include "scrooge/parallel.hpp"

namespace scrooge {

// Two-outcome channel where the signal is a coin bias x and Bob sees only
// head/tail frequencies. The optimal toss profile is N(x) = c / L(x) with
// L(x) = x/lambda + (1-x)/(1-lambda), and toss-weighted signals have density
// A / (sqrt(x(1-x)) L(x)^{3/2}).

struct CoinSolution {
  double lambda = 0.5;
  double c = 1.0;
  double A = 1.0;
  double script_N = 1.0;   // mean tosses per signal
  double script_NH = 0.5;  // mean heads per signal
  // Relative residuals of the two restriction integrals.
  double residual_total = 0.0;
  double residual_heads = 0.0;
};

/// c / L(x). Throws DomainError outside (0, 1).
double coin_rolls_profile(double x, const CoinSolution& sol);

/// Mean of x under the toss-weighted density for a given lambda; the map the
/// solver inverts. Increasing in lambda.
double coin_heads_fraction(double lambda);

/// Bisection for lambda on (1e-9, 1 - 1e-9), then c from the total-toss
/// restriction and A from normalization. Integrals use x = sin^2(theta) and
/// Gauss-Legendre from 128 nodes with doubling.
/// Throws NoRoot unless 0 < script_NH < script_N and the heads fraction is
/// attainable; InvalidArgument for script_N <= 0.
CoinSolution solve_coin(double script_N, double script_NH);

/// Solution with a prescribed lambda (script_NH follows from it).
CoinSolution solve_coin_for_lambda(double lambda, double script_N = 1.0);

/// sqrt(N(x) / (x(1-x))), the signal density with d_min = 1.
double coin_signal_density(double x, const CoinSolution& sol);

/// A / (sqrt(x(1-x)) L(x)^{3/2}).
double coin_density(double x, const CoinSolution& sol);

/// Integral of coin_density over (0, 1); 1 up to quadrature error.
double coin_density_mass(const CoinSolution& sol);

struct MismatchReport {
  double lambda = 0.5;
  // max |coin - real Scrooge| on the grid over [0.01, 0.99]
  double sup_norm = 0.0;
  double kl_nats = 0.0;  // KL(coin || real Scrooge)
  // Minus the log-log slope of density * sqrt(x(1-x)) against L(x).
  double coin_exponent = 0.0;
  double scrooge_exponent = 0.0;
};

/// Throws SymmetricCase when |lambda - 1/2| < 1e-9, where the two coincide.
MismatchReport scrooge_mismatch_report(const CoinSolution& sol);

struct OptimalityReport {
  std::size_t perturbations = 0;
  double relative_size = 1e-3;
  // max over trials of (F(perturbed) - F) / F after restoring both constraints
  double max_relative_increase = 0.0;
  // max |dF . dN| / (F * size): the first-order term of projected directions
  double max_first_order = 0.0;
  // worst constraint residual after the restore step
  double max_residual = 0.0;
  // relative first-order change for an unconstrained bump at x = lambda
  double control_change = 0.0;
  // deficit at twice the size over the deficit at the size (4 for quadratic)
  double scaling_ratio = 0.0;
  bool passed = false;
};

/// Random Legendre bumps dN/N = sum_{k<=8} a_k P_k(2x-1), projected onto
/// the null space of both linearized restrictions, scaled to sup |dN/N| =
/// 1e-3 and pushed back onto the constraint surface by Newton steps in
/// span{N, xN}. Passes when no trial raises the objective
/// int sqrt(N/(x(1-x))) dx by more than 1e-8 relative. Trial t uses
/// seed.derive(t).
OptimalityReport variational_optimality_check(const CoinSolution& sol, std::size_t n_perturbations,
                                              const SeedSpec& seed, Parallelism par = {});

/// CSV "x,coin_density,scrooge_real_density" on `points` interior nodes.
void write_coin_table_csv(std::ostream& out, const CoinSolution& sol, std::size_t points = 199);

}  // namespace scrooge
