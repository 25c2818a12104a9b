#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "scrooge/densities.hpp"
#include "scrooge/distortion.hpp"

using namespace scrooge;
using doctest::Approx;

namespace {

SimplexPoint pt(std::vector<double> v) { return make_simplex_point(std::move(v)); }

// Central-difference determinant of x_1..x_{n-1} -> y_1..y_{n-1} for the
// inverse map, written out independently of the library.
double numeric_jacobian(const std::vector<double>& x, const std::vector<double>& l) {
  const int n = static_cast<int>(x.size());
  auto inverse = [&](std::vector<double> head) {
    double last = 1.0;
    for (double v : head) last -= v;
    head.push_back(last);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += head[j] / l[j];
    std::vector<double> y(n - 1);
    for (int j = 0; j + 1 < n; ++j) y[j] = head[j] / l[j] / s;
    return y;
  };
  Eigen::MatrixXd m(n - 1, n - 1);
  const double h = 1e-6;
  for (int c = 0; c + 1 < n; ++c) {
    std::vector<double> up(x.begin(), x.end() - 1), dn = up;
    up[c] += h;
    dn[c] -= h;
    const auto yu = inverse(up), yd = inverse(dn);
    for (int r = 0; r + 1 < n; ++r) m(r, c) = (yu[r] - yd[r]) / (2 * h);
  }
  return std::abs(m.determinant());
}

}  // namespace

TEST_CASE("discrete distortion of the eigenbasis ensemble") {
  const std::vector<EnsembleMember> members = {{PureState::basis(Field::Complex, 2, 0), 0.5},
                                               {PureState::basis(Field::Complex, 2, 1), 0.5}};
  const auto out = distort_discrete(DiscreteEnsemble(members), Spectrum({0.7, 0.3}));
  CHECK(out.members()[0].weight == Approx(0.7));
  CHECK(out.members()[1].weight == Approx(0.3));
  CHECK(out.members()[0].state.amplitudes()[0] == Approx(1.0));
}

TEST_CASE("discrete distortion of the plus/minus ensemble") {
  const double r = std::sqrt(0.5);
  const std::vector<EnsembleMember> members = {
      {PureState::from_polar(Field::Real, {r, r}, {0.0, 0.0}), 0.5},
      {PureState::from_polar(Field::Real, {r, r}, {std::numbers::pi, 0.0}), 0.5}};
  const Spectrum spec({0.7, 0.3});
  const auto out = distort_discrete(DiscreteEnsemble(members), spec);
  for (const auto& m : out.members()) {
    CHECK(m.weight == Approx(0.5));
    CHECK(m.state.amplitudes()[0] == Approx(std::sqrt(0.7)));
    CHECK(m.state.amplitudes()[1] == Approx(std::sqrt(0.3)));
  }
  CHECK(out.members()[1].state.phases()[0] == Approx(std::numbers::pi));
  const Eigen::MatrixXcd rho = out.density_matrix();
  CHECK(std::abs(rho(0, 0) - 0.7) < 1e-12);
  CHECK(std::abs(rho(0, 1)) < 1e-12);
}

TEST_CASE("uniform spectrum leaves an ensemble unchanged") {
  const auto ens = DiscreteEnsemble::eigenstates(Spectrum::uniform(3), Field::Complex);
  const auto out = distort_discrete(ens, Spectrum::uniform(3));
  for (std::size_t i = 0; i < 3; ++i) CHECK(out.members()[i].weight == Approx(1.0 / 3));
}

TEST_CASE("distortion checks the completely mixed precondition") {
  const auto ens = DiscreteEnsemble::eigenstates(Spectrum({0.7, 0.3}), Field::Complex);
  try {
    distort_discrete(ens, Spectrum({0.6, 0.4}));
    FAIL("expected NotCompletelyMixed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotCompletelyMixed);
  }
  const auto mixed = DiscreteEnsemble::eigenstates(Spectrum::uniform(2), Field::Complex);
  CHECK_THROWS_AS(distort_discrete(mixed, Spectrum({1.0, 0.0})), Error);
}

TEST_CASE("random complete ensembles distort to diag(lambda)") {
  // Columns of a random unitary, equal weights, give density I/n.
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 4; ++n) {
    Eigen::MatrixXcd z(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) z(i, j) = {g(rng), g(rng)};
    const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
    std::vector<EnsembleMember> members;
    for (int c = 0; c < n; ++c) {
      std::vector<cplx> v(q.col(c).data(), q.col(c).data() + n);
      members.push_back({PureState::from_vector(Field::Complex, v), 1.0 / n});
    }
    const auto l = oracle::random_simplex(rng, n, 0.05);
    const Spectrum spec(l);
    const auto out = distort_discrete(DiscreteEnsemble(members), spec);
    double wsum = 0.0;
    for (const auto& m : out.members()) wsum += m.weight;
    CHECK(wsum == Approx(1.0).epsilon(1e-14));
    const Eigen::MatrixXcd rho = out.density_matrix();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) REQUIRE(std::abs(rho(i, j) - (i == j ? spec[i] : 0.0)) < 1e-9);
  }
}

TEST_CASE("coordinate map examples") {
  const Spectrum skew({0.7, 0.3});
  const auto x = distort_coords(pt({0.5, 0.5}), skew);
  CHECK(x[0] == Approx(0.7));
  const auto y = distort_coords_inverse(pt({0.7, 0.3}), skew);
  CHECK(y[0] == Approx(0.5));
  CHECK(distort_coords(pt({1.0, 0.0}), skew)[0] == 1.0);
  CHECK(distort_coords_inverse(pt({0.0, 1.0}), skew)[1] == 1.0);
  CHECK(distort_coords(pt({0.2, 0.8}), Spectrum::uniform(2))[0] == Approx(0.2));
}

TEST_CASE("Jacobian and expectation factor examples") {
  const Spectrum skew({0.7, 0.3});
  CHECK(distort_jacobian(pt({0.5, 0.5}), skew) == Approx(0.840000).epsilon(1e-6));
  CHECK(distort_jacobian(pt({0.1, 0.9}), Spectrum::uniform(2)) == Approx(1.0));
  CHECK(expectation_factor(pt({0.5, 0.5}), skew) == Approx(0.5));
  CHECK(expectation_factor(pt({1.0, 0.0}), skew) == Approx(0.7));
  const auto x = pt({0.5, 0.5});
  CHECK(expectation_factor(distort_coords_inverse(x, skew), skew) == Approx(1.0 / (0.5 / 0.7 + 0.5 / 0.3)));
  CHECK(expectation_factor(distort_coords_inverse(x, skew), skew) == Approx(0.42));
}

TEST_CASE("Jacobian matches finite differences") {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + rep % 4;
    const auto x = oracle::random_simplex(rng, n, 0.05);
    const auto l = oracle::random_simplex(rng, n, 0.05);
    const double want = numeric_jacobian(x, l);
    REQUIRE(distort_jacobian(pt(x), Spectrum(l)) == Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("round trip and assembly identities") {
  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 10000; ++rep) {
    const int n = 2 + rep % 3;
    const auto x = pt(oracle::random_simplex(rng, n, 1e-3));
    const Spectrum s(oracle::random_simplex(rng, n, 0.02));
    const auto y = distort_coords_inverse(x, s);
    const auto back = distort_coords(y, s);
    for (int j = 0; j < n; ++j) REQUIRE(std::abs(back[j] - x[j]) < 1e-12);

    const double e = expectation_factor(y, s), jac = distort_jacobian(x, s);
    const double complex_lhs = n * uniform_complex_density(n) * e * jac;
    REQUIRE(complex_lhs == Approx(scrooge_complex_density(x, s)).epsilon(1e-10));
    const double real_lhs = n * uniform_real_density(y) * e * jac;
    REQUIRE(real_lhs == Approx(scrooge_real_density(x, s)).epsilon(1e-10));
  }
}
