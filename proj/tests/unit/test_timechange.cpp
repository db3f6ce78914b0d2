#include "doctest.h"

#include <cmath>

#include "aniso/errors.hpp"
#include "aniso/rng.hpp"
#include "aniso/timechange.hpp"

using namespace aniso;

namespace {

WienerGrid grid_from(std::vector<double> values, double dt) {
  WienerGrid w;
  w.dt = dt;
  w.values = std::move(values);
  return w;
}

}  // namespace

TEST_CASE("simulate_wiener shape and moments") {
  const auto w = simulate_wiener(1.0, 1e-3, 5);
  CHECK(w.cells() == 1000);
  CHECK(w.values[0] == 0.0);
  CHECK(w.horizon() == doctest::Approx(1.0));
  double sum = 0.0;
  double sq = 0.0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    const auto v = simulate_wiener(1.0, 0.01, derive_seed(8, "wiener", r)).values.back();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / reps) < 5 / std::sqrt(static_cast<double>(reps)));
  // Var of the sample variance of a unit normal is 2 / reps.
  CHECK(std::abs(sq / reps - 1.0) < 5 * std::sqrt(2.0 / reps));
  CHECK_THROWS_AS(simulate_wiener(1.0, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(simulate_wiener(1.0, 2.0, 1), InvalidArgument);
}

TEST_CASE("WienerGrid::at interpolates") {
  const auto w = grid_from({0.0, 1.0, -1.0}, 0.5);
  CHECK(w.at(0.25) == doctest::Approx(0.5));
  CHECK(w.at(0.75) == doctest::Approx(0.0));
  CHECK(w.at(1.0) == -1.0);
}

TEST_CASE("additive_functional on a hand grid") {
  // Signs at left endpoints: +, +, -, -.
  const auto w = grid_from({0.0, 0.3, -0.1, -0.4, 0.2}, 0.25);
  const auto tc = additive_functional(w, 3.0, 1.5);
  REQUIRE(tc.cells() == 4);
  CHECK(tc.values[0] == 0.0);
  CHECK(tc.values[1] == doctest::Approx(0.75));
  CHECK(tc.values[2] == doctest::Approx(1.5));
  CHECK(tc.values[3] == doctest::Approx(1.875));
  CHECK(tc.final_value() == doctest::Approx(2.25));
  CHECK(tc.slope(1) == 3.0);
  CHECK(tc.slope(2) == 1.5);
  CHECK(tc.excess(4) == doctest::Approx(2.25 - 1.0));
  CHECK(tc.evaluate(0.125) == doctest::Approx(0.375));
  CHECK(inverse_time_change(tc, 1.5) == doctest::Approx(0.5));
  CHECK(inverse_time_change(tc, 1.6875) == doctest::Approx(0.625));
  CHECK(inverse_time_change(tc, 0.0) == 0.0);
  CHECK_THROWS(inverse_time_change(tc, 3.0));
  CHECK_THROWS_AS(additive_functional(w, 1.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(additive_functional(w, 2.0, 0.5), InvalidArgument);
}

TEST_CASE("bounds and monotonicity on random paths") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto w = simulate_wiener(1.0, 1e-3, derive_seed(2, "tc", s));
    const auto tc = additive_functional(w, 2.0, 1.0);
    for (std::size_t k = 1; k <= tc.cells(); ++k) {
      REQUIRE(tc.values[k] >= tc.values[k - 1]);
      REQUIRE(tc.excess(k) >= tc.excess(k - 1));
      REQUIRE(tc.values[k] >= 1.0 * tc.time(k) - 1e-12);
      REQUIRE(tc.values[k] <= 2.0 * tc.time(k) + 1e-12);
    }
    const double a = tc.final_value();
    const double t = inverse_time_change(tc, 0.7 * a);
    CHECK(tc.evaluate(t) == doctest::Approx(0.7 * a).epsilon(1e-12));
  }
}

TEST_CASE("equal constants: A(t) = gamma t and Y is a time-scaled W") {
  const auto w = simulate_wiener(1.0, 1e-3, 3);
  const auto tc = additive_functional(w, 1.5, 1.5);
  for (std::size_t k = 0; k <= tc.cells(); k += 100) CHECK(tc.values[k] == doctest::Approx(1.5 * tc.time(k)));
  const std::vector<double> times{0.3, 0.6, 1.2};
  const auto y = oscillating_bm(w, 1.5, 1.5, times);
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(y[i] == doctest::Approx(w.at(times[i] / 1.5)));
}

TEST_CASE("oscillating_bm needs enough horizon") {
  const auto w = simulate_wiener(1.0, 1e-2, 3);
  const std::vector<double> times{5.0};
  CHECK_THROWS(oscillating_bm(w, 2.0, 1.0, times));
}
