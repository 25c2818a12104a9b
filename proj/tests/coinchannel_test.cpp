#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "scrooge/coinchannel.hpp"
#include "scrooge/densities.hpp"

using namespace scrooge;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^1 f(x)/sqrt(x(1-x)) dx = int_0^{pi/2} 2 f(sin^2 t) dt by Simpson.
template <class F>
double arcsine_simpson(F&& f) {
  return oracle::simpson([&](double t) { return 2.0 * f(std::sin(t) * std::sin(t)); }, 0.0, kPi / 2, 20000);
}

double ell(double x, double l) { return x / l + (1 - x) / (1 - l); }

}  // namespace

TEST_CASE("toss profile examples") {
  CoinSolution s;
  s.lambda = 0.5;
  s.c = 3.0;
  CHECK(coin_rolls_profile(0.2, s) == Approx(1.5));
  CHECK(coin_rolls_profile(0.9, s) == Approx(1.5));
  s.lambda = 0.7;
  CHECK(coin_rolls_profile(0.7, s) == Approx(1.5));
  s.lambda = 0.3;
  CHECK(coin_rolls_profile(0.2, s) > coin_rolls_profile(0.6, s));
  CHECK_THROWS_AS(coin_rolls_profile(0.0, s), Error);
  CHECK_THROWS_AS(coin_density(1.0, s), Error);
}

TEST_CASE("signal density plug-in") {
  CoinSolution s;
  s.lambda = 0.5;
  s.c = 2.0;
  CHECK(coin_signal_density(0.5, s) == Approx(2.0));
  CHECK(coin_signal_density(0.2, s) == Approx(coin_signal_density(0.8, s)));
}

TEST_CASE("symmetric request gives the arcsine law") {
  const auto s = solve_coin(10.0, 5.0);
  CHECK(s.lambda == Approx(0.5).epsilon(1e-12));
  CHECK(coin_rolls_profile(0.3, s) == Approx(10.0).epsilon(1e-9));
  for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
    CHECK(coin_density(x, s) == Approx(1.0 / (kPi * std::sqrt(x * (1 - x)))).epsilon(1e-10));
  }
}

TEST_CASE("asymmetric request solves both restrictions") {
  const auto s = solve_coin(20.0, 14.0);
  CHECK(s.lambda > 0.5);
  CHECK(s.lambda < 1.0);
  CHECK(s.residual_total < 1e-8);
  CHECK(s.residual_heads < 1e-8);
  // Independent check of the restrictions by Simpson.
  auto n = [&](double x) { return s.c / ell(x, s.lambda); };
  const double r1 = arcsine_simpson([&](double x) { return std::pow(n(x), 1.5) - 20.0 * std::sqrt(n(x)); });
  const double r2 = arcsine_simpson([&](double x) { return x * std::pow(n(x), 1.5) - 14.0 * std::sqrt(n(x)); });
  const double scale = arcsine_simpson([&](double x) { return std::pow(n(x), 1.5); });
  CHECK(std::abs(r1) / scale < 1e-8);
  CHECK(std::abs(r2) / scale < 1e-8);
  // Normalization constant by Simpson.
  CHECK(s.A * arcsine_simpson([&](double x) { return std::pow(ell(x, s.lambda), -1.5); }) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("heads fraction is increasing") {
  double prev = 0.0;
  for (double l = 0.05; l < 1.0; l += 0.05) {
    const double h = coin_heads_fraction(l);
    CHECK(h > prev);
    prev = h;
  }
  CHECK(coin_heads_fraction(0.5) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unreachable requests have no root") {
  for (auto [n, nh] : {std::pair{5.0, 5.0}, std::pair{5.0, 0.0}, std::pair{5.0, 6.0}}) {
    try {
      solve_coin(n, nh);
      FAIL("expected NoRoot");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoRoot);
    }
  }
}

TEST_CASE("extreme heads fractions still solve") {
  const auto s = solve_coin(1.0, 0.02);
  CHECK(s.residual_heads < 1e-8);
  CHECK(coin_density_mass(s) == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("normalization for random lambda") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int t = 0; t < 20; ++t) {
    const auto s = solve_coin_for_lambda(u(rng), 7.0);
    CHECK(coin_density_mass(s) == Approx(1.0).epsilon(1e-8));
    CHECK(s.residual_total < 1e-8);
    CHECK(s.residual_heads < 1e-8);
  }
}

TEST_CASE("coincidence with real Scrooge at one half") {
  const auto s = solve_coin_for_lambda(0.5);
  const Spectrum half({0.5, 0.5});
  for (double x = 0.01; x < 0.99; x += 0.01) {
    const double scr = scrooge_real_density(make_simplex_point({x, 1 - x}), half);
    CHECK(std::abs(coin_density(x, s) - scr) / scr < 1e-10);
  }
  CHECK_THROWS_AS(scrooge_mismatch_report(s), Error);
}

TEST_CASE("exponent mismatch and KL") {
  for (double l : {0.3, 0.7}) {
    const auto s = solve_coin_for_lambda(l);
    const auto r = scrooge_mismatch_report(s);
    CHECK(r.coin_exponent == Approx(1.5).epsilon(1e-6));
    CHECK(r.scrooge_exponent == Approx(2.0).epsilon(1e-6));
    CHECK(r.kl_nats > 1e-3);
    CHECK(r.sup_norm > 0.0);
    // KL oracle from the closed forms.
    const double kl = arcsine_simpson([&](double x) {
      const double coin = s.A * std::pow(ell(x, l), -1.5);
      const double scr = 2.0 / (kPi * std::sqrt(l * (1 - l))) * std::pow(ell(x, l), -2.0);
      return coin * std::log(coin / scr);
    });
    CHECK(r.kl_nats == Approx(kl).epsilon(1e-8));
  }
}

TEST_CASE("variational solution is a constrained maximum") {
  for (double l : {0.3, 0.7}) {
    const auto s = solve_coin_for_lambda(l, 12.0);
    const auto r = variational_optimality_check(s, 100, {42, 0});
    CHECK(r.passed);
    CHECK(r.max_relative_increase <= 1e-8);
    CHECK(r.max_first_order < 1e-9);
    CHECK(r.control_change > 1e-5);
    CHECK(r.scaling_ratio == Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("optimality check is thread invariant") {
  const auto s = solve_coin_for_lambda(0.7);
  const auto a = variational_optimality_check(s, 20, {1, 0}, {1});
  const auto b = variational_optimality_check(s, 20, {1, 0}, {3});
  CHECK(a.max_relative_increase == b.max_relative_increase);
}

TEST_CASE("coin table CSV") {
  std::stringstream ss;
  write_coin_table_csv(ss, solve_coin_for_lambda(0.3), 9);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "x,coin_density,scrooge_real_density");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 9);
}

TEST_CASE("golden root for heads fraction 0.7") {
  const auto s = solve_coin(1.0, 0.7);
  CHECK(s.lambda == Approx(0.75511548448210786).epsilon(1e-12));
  CHECK(coin_heads_fraction(s.lambda) == Approx(0.7).epsilon(1e-12));
}
