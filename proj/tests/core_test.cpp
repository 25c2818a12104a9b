#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scrooge/core.hpp"
#include "scrooge/parallel.hpp"

using namespace scrooge;

namespace {

template <class F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected scrooge::Error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("spectrum normalizes and validates") {
  const Spectrum s({7.0, 3.0});
  CHECK(s[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(s.max() == doctest::Approx(0.7));
  CHECK(s.strictly_positive());
  CHECK_FALSE(Spectrum({1.0, 0.0}).strictly_positive());
  CHECK(error_code([] { Spectrum({1.0}); }) == Errc::DimensionTooSmall);
  CHECK(error_code([] { Spectrum({0.5, -0.1, 0.6}); }) == Errc::NegativeCoordinate);
  CHECK(Spectrum::uniform(4)[2] == doctest::Approx(0.25));
}

TEST_CASE("simplex points") {
  const auto p = make_simplex_point({0.2, 0.3, 0.5});
  CHECK(p.size() == 3);
  CHECK(p[2] == doctest::Approx(0.5));
  CHECK(error_code([] { make_simplex_point({0.5, 0.6}); }) == Errc::NotNormalized);
  CHECK(error_code([] { make_simplex_point({1.1, -0.1}); }) == Errc::NegativeCoordinate);
  CHECK(error_code([] { make_simplex_point({1.0}); }) == Errc::DimensionTooSmall);
  // Tiny negative roundoff is clamped away.
  const auto q = make_simplex_point({1.0 + 1e-13, -1e-13});
  CHECK(q[1] == 0.0);
}

TEST_CASE("pure states fix the global phase on the last component") {
  const std::vector<cplx> v = {std::polar(0.6, 1.0), std::polar(0.8, -0.4)};
  const auto s = PureState::from_vector(Field::Complex, v);
  CHECK(s.phases()[1] == 0.0);
  // c_j = a_j e^{-i theta_j}; relative phase arg(c_1) - arg(c_2) = 1.4.
  CHECK(s.phases()[0] == doctest::Approx(2 * std::numbers::pi - 1.4));
  CHECK(s.amplitudes()[0] == doctest::Approx(0.6));
  const auto back = s.vector();
  CHECK(std::abs(back[0] / back[1] - v[0] / v[1]) < 1e-12);

  const auto p = state_probabilities(s);
  CHECK(p[0] == doctest::Approx(0.36));
  CHECK(p[1] == doctest::Approx(0.64));
}

TEST_CASE("real states carry signs only") {
  const std::vector<cplx> v = {-0.6, 0.8};
  const auto s = PureState::from_vector(Field::Real, v);
  CHECK(s.phases()[0] == doctest::Approx(std::numbers::pi));
  CHECK(s.phases()[1] == 0.0);
  const std::vector<cplx> bad = {cplx(0.6, 0.1), 0.8};
  CHECK(error_code([&] { PureState::from_vector(Field::Real, bad); }) == Errc::FieldMismatch);
  CHECK(error_code([] { PureState::from_polar(Field::Real, {0.6, 0.8}, {0.3, 0.0}); }) == Errc::InvalidArgument);
}

TEST_CASE("gauge falls back to the last nonzero amplitude") {
  const auto s = PureState::from_polar(Field::Complex, {1.0, 0.0}, {0.7, 0.2});
  CHECK(s.phases()[0] == 0.0);
  CHECK(s.phases()[1] == 0.0);
}

TEST_CASE("measurements check completeness") {
  const auto eig = Measurement::eigenbasis(3, Field::Complex);
  CHECK(eig.is_complete());
  CHECK(eig.outcome_count() == 3);

  const double r = std::sqrt(0.5);
  const auto pm = Measurement::from_basis(Field::Real, {{r, r}, {r, -r}});
  const auto e1 = PureState::basis(Field::Real, 2, 0);
  const auto probs = outcome_probabilities(e1, pm);
  CHECK(probs[0] == doctest::Approx(0.5));
  CHECK(probs[1] == doctest::Approx(0.5));

  CHECK(error_code([&] { Measurement::from_basis(Field::Real, {{1.0, 0.0}, {r, r}}); }) == Errc::NotComplete);
  CHECK(error_code([&] { outcome_probabilities(PureState::basis(Field::Complex, 2, 0), pm); }) ==
        Errc::FieldMismatch);
  CHECK(error_code([&] { outcome_probabilities(PureState::basis(Field::Real, 3, 0), pm); }) ==
        Errc::DimensionMismatch);
}

TEST_CASE("trivial measurement pools every effect") {
  const auto t = Measurement::trivial(3, Field::Complex);
  CHECK(t.outcome_count() == 1);
  CHECK_FALSE(t.is_complete());
  const std::vector<cplx> v = {0.6, cplx(0, 0.48), 0.64};
  const auto p = outcome_probabilities(PureState::from_vector(Field::Complex, v), t);
  CHECK(p[0] == doctest::Approx(1.0));
}

TEST_CASE("seeded streams are reproducible and distinct") {
  const SeedSpec a{42, 0};
  Rng r1 = make_rng(a), r2 = make_rng(a), r3 = make_rng(a.derive(1));
  for (int i = 0; i < 5; ++i) {
    const auto x = r1();
    CHECK(x == r2());
    CHECK(x != r3());
  }
  CHECK(a.derive(3) == a.derive(3));
  CHECK_FALSE(a.derive(3) == a.derive(4));
  CHECK_FALSE(a.derive(3) == SeedSpec{42, 1}.derive(3));
  Rng r = make_rng(a);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform_open(r);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), Parallelism{4}, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) REQUIRE(h == 1);
  CHECK_THROWS_AS(parallel_for(10, Parallelism{3}, [](std::size_t i) {
                    if (i == 7) fail(Errc::DomainError, "boom");
                  }),
                  Error);
}

TEST_CASE("error messages carry the code name") {
  try {
    fail(Errc::OddDimension, "details");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("OddDimension") != std::string::npos);
  }
}
