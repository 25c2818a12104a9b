#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "scrooge/densities.hpp"
#include "scrooge/dicechannel.hpp"
#include "scrooge/sampling.hpp"

using namespace scrooge;
using doctest::Approx;

namespace {

ChannelConfig real_die(std::vector<double> bounds, std::size_t target) {
  ChannelConfig c;
  c.bounds = std::move(bounds);
  c.d_min = dmin_for_signal_count(c, target);
  return c;
}

// Same closed form as in the sampling tests, written out again here.
double scrooge2_cdf(double l1, double x) {
  const double l2 = 1.0 - l1, a = 1.0 / l2, b = 1.0 / l1 - 1.0 / l2;
  return (1.0 / (a * a) - 1.0 / ((a + b * x) * (a + b * x))) / (l1 * l2 * b);
}

}  // namespace

TEST_CASE("semi-axes follow the moment condition") {
  ChannelConfig c;
  c.bounds = {8, 2, 5};
  auto s = semi_axes(c);
  CHECK(s[0] == Approx(std::sqrt(40.0)));
  CHECK(s[2] == Approx(5.0));
  c.mode = DieMode::PairedDie;
  s = semi_axes(c);
  REQUIRE(s.size() == 6);
  CHECK(s[0] == Approx(std::sqrt(32.0)));
  CHECK(s[1] == Approx(std::sqrt(32.0)));
  CHECK(s[5] == Approx(std::sqrt(20.0)));
}

TEST_CASE("alpha_max example and boundary check") {
  ChannelConfig c;
  c.bounds = {8, 2};
  CHECK(alpha_max(make_simplex_point({0.5, 0.5}), c) == Approx(3.57771).epsilon(1e-5));

  c.bounds = {5, 3, 2};
  std::mt19937_64 rng(3);
  const double s2[] = {25.0, 15.0, 10.0};
  for (int t = 0; t < 50; ++t) {
    auto x = oracle::random_simplex(rng, 3);
    const double a = alpha_max(make_simplex_point(x), c);
    double q = 0.0;
    for (int j = 0; j < 3; ++j) q += x[j] * a * a / s2[j];
    CHECK(q == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Fisher separation uses midpoint means") {
  const std::vector<double> a{1.0, 2.0, 4.0}, b{2.0, 2.0, 1.0};
  CHECK(fisher_separation(a, b) == Approx(std::sqrt(1.0 / 1.5 + 9.0 / 2.5)));
  CHECK(fisher_separation(a, a) == 0.0);
  const std::vector<double> z{0.0, 2.0, 4.0};
  CHECK_THROWS_AS(fisher_separation(z, b), Error);
}

TEST_CASE("lattice matches a brute-force scan") {
  ChannelConfig c;
  c.bounds = {3, 1, 2};
  c.d_min = 0.6;
  const auto signals = place_signals(c);
  const double h = 0.3, s2[] = {15.0, 5.0, 10.0};
  std::size_t brute = 0;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      for (int k = 0; k < 40; ++k) {
        const double a = (i + 0.5) * h, b = (j + 0.5) * h, d = (k + 0.5) * h;
        if (a * a / s2[0] + b * b / s2[1] + d * d / s2[2] <= 1.0) ++brute;
      }
  CHECK(signals.size() == brute);
  CHECK(lattice_count(c) == brute);
  const auto axes = semi_axes(c);
  for (const auto& s : signals) {
    CHECK(inside_region(s.alpha, axes));
    for (double a : s.alpha) {
      const double cell = a / h - 0.5;
      CHECK(std::abs(cell - std::round(cell)) < 1e-9);
    }
  }
}

TEST_CASE("dmin helper hits the target count") {
  for (std::size_t target : {5000u, 50000u}) {
    const auto c = real_die({5, 3, 2}, target);
    const double ratio = static_cast<double>(lattice_count(c)) / static_cast<double>(target);
    CHECK(ratio == Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("empty region and bad configs") {
  ChannelConfig c;
  c.bounds = {0.01, 0.01};
  c.d_min = 10.0;
  CHECK_THROWS_AS(place_signals(c), Error);
  try {
    place_signals(c);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyRegion);
  }
  c.bounds = {1.0};
  CHECK_THROWS_AS(semi_axes(c), Error);
  c.bounds = {1.0, -1.0};
  CHECK_THROWS_AS(semi_axes(c), Error);
}

TEST_CASE("uniform placement stays inside and is seeded") {
  ChannelConfig c;
  c.bounds = {4, 1};
  c.d_min = 0.5;
  c.placement = Placement::UniformRandom;
  const auto a = place_signals(c, {9, 0}), b = place_signals(c, {9, 0});
  REQUIRE(a.size() == lattice_count(c));
  const auto axes = semi_axes(c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].alpha == b[i].alpha);
    CHECK(inside_region(a[i].alpha, axes));
  }
}

TEST_CASE("region moments equal the bounds") {
  ChannelConfig c;
  c.bounds = {8, 2};
  auto m = region_moment_check(c, 100000, {1, 0});
  CHECK(m.passed);
  CHECK(m.mean[0] == Approx(8.0).epsilon(0.02));
  c.bounds = {5, 3, 2};
  CHECK(region_moment_check(c, 100000, {1, 1}).passed);
  c.mode = DieMode::PairedDie;
  c.bounds = {3, 1};
  m = region_moment_check(c, 100000, {1, 2});
  CHECK(m.passed);
  CHECK(m.mean[1] == Approx(1.0).epsilon(0.03));
}

TEST_CASE("rolls are Poisson with the signal means") {
  const std::vector<DieSignal> one{{{std::sqrt(3.0), std::sqrt(0.5)}}};
  const auto log = roll_dice(one, 200000, {5, 0});
  double s0 = 0, s1 = 0, q0 = 0;
  for (std::size_t r = 0; r < log.rounds(); ++r) {
    s0 += log.counts[2 * r];
    s1 += log.counts[2 * r + 1];
    q0 += double(log.counts[2 * r]) * log.counts[2 * r];
  }
  const double n = 200000;
  CHECK(s0 / n == Approx(3.0).epsilon(0.01));
  CHECK(s1 / n == Approx(0.5).epsilon(0.02));
  CHECK(q0 / n - (s0 / n) * (s0 / n) == Approx(3.0).epsilon(0.03));
}

TEST_CASE("rolls do not depend on the thread count") {
  const auto signals = place_signals(real_die({5, 3, 2}, 500));
  const auto a = roll_dice(signals, 30000, {7, 0}, {1});
  const auto b = roll_dice(signals, 30000, {7, 0}, {3});
  CHECK(a.signal == b.signal);
  CHECK(a.counts == b.counts);
}

TEST_CASE("real die reproduces the real Scrooge density") {
  const auto c = real_die({8, 2}, 2000000);
  const auto signals = place_signal_set(c);
  const auto rolls = roll_dice(signals, 300000, {42, 0});
  const auto spec = c.spectrum();
  for (auto mode : {RollWeighting::Realized, RollWeighting::Expected}) {
    const auto induced = induced_density(signals, rolls, mode);
    const auto fit = induced.fit(make_density(DensityKind::ScroogeReal, spec), {});
    CHECK(fit.pvalue > 0.001);
    REQUIRE(fit.ks);
    CHECK(fit.ks->pvalue > 0.001);
  }
  // The uniform-induced density should be rejected decisively.
  const auto induced = induced_density(signals, rolls);
  CHECK(induced.fit(make_density(DensityKind::UniformRealInduced, spec), {}).pvalue < 1e-6);
}

TEST_CASE("three-outcome die fits on the angle grid") {
  const auto c = real_die({5, 3, 2}, 10000000);
  const auto signals = place_signal_set(c);
  const auto rolls = roll_dice(signals, 300000, {42, 1});
  const auto fit = induced_density(signals, rolls).fit(make_density(DensityKind::ScroogeReal, c.spectrum()), {});
  CHECK(fit.pvalue > 0.001);
}

TEST_CASE("paired die marginal is complex Scrooge") {
  ChannelConfig c;
  c.bounds = {3, 1};
  c.mode = DieMode::PairedDie;
  c.d_min = dmin_for_signal_count(c, 4000000);
  const auto signals = place_signal_set(c);
  const auto rolls = roll_dice(signals, 300000, {42, 2});
  const auto induced = ab_blind_marginalize(induced_density(signals, rolls));
  const auto fit = induced.fit(make_density(DensityKind::ScroogeComplex, Spectrum({0.75, 0.25})), {});
  CHECK(fit.pvalue > 0.001);
  REQUIRE(fit.ks);
  CHECK(fit.ks->pvalue > 0.001);
}

TEST_CASE("paired density marginalizes to complex Scrooge") {
  // Rejection samples of the 4-outcome real Scrooge density with halved
  // pair weights are samples of paired_ab_density.
  const auto batch = sample_scrooge(Spectrum({0.375, 0.375, 0.125, 0.125}), Field::Real, 40000,
                                    SamplingMode::Rejection, {8, 0});
  const auto x = ab_blind_marginalize(std::span<const SimplexPoint>(batch.points));
  std::vector<double> x1;
  for (const auto& p : x) x1.push_back(p[0]);
  const double d = oracle::ks_distance(x1, [](double v) { return scrooge2_cdf(0.75, v); });
  CHECK(ks_pvalue(d, 40000.0) > 0.001);
}

TEST_CASE("marginalization rejects odd dimensions") {
  CHECK_THROWS_AS(ab_blind_marginalize(make_simplex_point({0.2, 0.3, 0.5})), Error);
  const auto m = ab_blind_marginalize(make_simplex_point({0.1, 0.2, 0.3, 0.4}));
  CHECK(m[0] == Approx(0.3));
  CHECK(m[1] == Approx(0.7));
}

TEST_CASE("induced density needs enough rounds") {
  const std::vector<DieSignal> one{{{1.0, 1.0}}};
  CHECK_THROWS_AS(induced_density(one, roll_dice(one, 999, {})), Error);
}

TEST_CASE("roll CSV round trip") {
  const auto signals = place_signals(real_die({2, 1}, 50));
  const auto log = roll_dice(signals, 100, {3, 0});
  std::stringstream ss;
  write_rolls_csv(ss, log);
  const auto back = read_rolls_csv(ss);
  CHECK(back.outcomes == 2);
  CHECK(back.signal == log.signal);
  CHECK(back.counts == log.counts);
  CHECK(log.record(5).counts.size() == 2);
}

TEST_CASE("halving the spacing multiplies the count by about 2^n") {
  ChannelConfig c;
  c.bounds = {8, 2};
  c.d_min = 0.2;
  const double a = static_cast<double>(lattice_count(c));
  c.d_min = 0.1;
  CHECK(static_cast<double>(lattice_count(c)) / a == Approx(4.0).epsilon(0.1));
  c.bounds = {5, 3, 2};
  c.d_min = 0.4;
  const double b = static_cast<double>(lattice_count(c));
  c.d_min = 0.2;
  CHECK(static_cast<double>(lattice_count(c)) / b == Approx(8.0).epsilon(0.1));
}

TEST_CASE("zero-mean outcome never fires and totals are Poisson") {
  const std::vector<DieSignal> one{{{2.0, 0.0}}};
  const auto log = roll_dice(one, 100000, {6, 0});
  double s = 0, q = 0;
  for (std::size_t r = 0; r < log.rounds(); ++r) {
    CHECK_FALSE(log.counts[2 * r + 1] != 0u);
    const double t = static_cast<double>(log.total(r));
    s += t;
    q += t * t;
  }
  const double mean = s / 1e5, var = q / 1e5 - mean * mean;
  CHECK(mean == Approx(4.0).epsilon(0.01));
  CHECK(var / mean == Approx(1.0).epsilon(0.05));
}

TEST_CASE("single pair moment and point-mass induced density") {
  ChannelConfig c;
  c.mode = DieMode::PairedDie;
  c.bounds = {10};
  const auto m = region_moment_check(c, 100000, {2, 0});
  CHECK(m.passed);
  CHECK(m.mean[0] == Approx(10.0).epsilon(0.02));

  const std::vector<DieSignal> same(5, DieSignal{{1.0, 2.0}});
  const auto induced = induced_density(same, roll_dice(same, 2000, {1, 0}));
  for (const auto& p : induced.points) CHECK(p[0] == Approx(0.2));
}
