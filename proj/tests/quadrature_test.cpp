#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "scrooge/quadrature.hpp"

using namespace scrooge;

TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2n-1") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
    const auto& rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = static_cast<int>(2 * n - 1);
    const double got = integrate_fixed([&](double x) { return std::pow(x, deg - (deg % 2)); }, -1.0, 1.0, n);
    const int even = deg - (deg % 2);
    CHECK(got == doctest::Approx(2.0 / (even + 1)).epsilon(1e-12));
  }
}

TEST_CASE("adaptive doubling converges or reports failure") {
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0));
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {16, 64, 1e-14}), Error);
}

TEST_CASE("arcsine substitution handles endpoint singularities") {
  const double got = integrate_arcsine([](double x) { return 1.0 / (std::numbers::pi * std::sqrt(x * (1 - x))); },
                                       0.0, 1.0);
  CHECK(got == doctest::Approx(1.0).epsilon(1e-12));
  const double part = integrate_arcsine([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 0.25);
  CHECK(part == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("angle chart round trip and volume") {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 100; ++rep) {
      const auto x = oracle::random_simplex(rng, n);
      std::vector<double> theta(n - 1), y(n);
      simplex_chart::to_angles(x, theta);
      simplex_chart::to_simplex(theta, y);
      for (int j = 0; j < n; ++j) REQUIRE(y[j] == doctest::Approx(x[j]).epsilon(1e-12));
    }
    // Simplex volume 1/(n-1)!.
    const double vol = integrate_simplex_fixed([](std::span<const double>) { return 1.0; }, n, 12);
    CHECK(vol == doctest::Approx(1.0 / oracle::factorial(n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("simplex integration of a monomial") {
  // Dirichlet integral: int x1 x2^2 over the 2-simplex = 1! 2! 0! / 5! = 1/60.
  auto f = [](std::span<const double> x) { return x[0] * x[1] * x[1]; };
  CHECK(integrate_simplex(f, 3) == doctest::Approx(1.0 / 60.0).epsilon(1e-10));
  CHECK(integrate_simplex_qmc(f, 3, 1 << 16, 3) == doctest::Approx(1.0 / 60.0).epsilon(1e-3));
}

TEST_CASE("shifted Sobol points stay inside the open cube") {
  const std::vector<double> shift = {0.3, 0.9, 0.0};
  ShiftedSobol a(3, shift), b(3, shift);
  std::vector<double> u(3), v(3);
  double mean = 0.0;
  for (int i = 0; i < 4096; ++i) {
    a.next(u);
    b.next(v);
    for (int d = 0; d < 3; ++d) {
      REQUIRE(u[d] > 0.0);
      REQUIRE(u[d] < 1.0);
      REQUIRE(u[d] == v[d]);
    }
    mean += u[0];
  }
  CHECK(mean / 4096 == doctest::Approx(0.5).epsilon(1e-3));
}
