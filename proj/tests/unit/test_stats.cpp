#include "doctest.h"

#include <cmath>
#include <string>

#include "aniso/errors.hpp"
#include "aniso/stats.hpp"

using namespace aniso;

TEST_CASE("fit_loglog exact power laws") {
  const std::vector<std::pair<double, double>> id{{10, 10}, {100, 100}, {1000, 1000}};
  const auto f = fit_loglog(id);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(f.intercept) < 1e-12);
  CHECK(f.r_squared == doctest::Approx(1.0));
  std::vector<std::pair<double, double>> sq;
  for (double n : {16.0, 64.0, 256.0, 1024.0}) sq.emplace_back(n, 3.0 * std::pow(n, 0.75));
  const auto g = fit_loglog(sq);
  CHECK(g.slope == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(g.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("fit_loglog drops zeros and enforces point count") {
  const std::vector<std::pair<double, double>> pts{{10, 10}, {20, 0}, {100, 100}, {1000, 1000}};
  const auto f = fit_loglog(pts);
  CHECK(f.points.size() == 3);
  const std::vector<std::pair<double, double>> few{{10, 10}, {20, 0}, {100, 100}};
  CHECK_THROWS_AS(fit_loglog(few), InvalidArgument);
  const std::vector<std::pair<double, double>> flat{{10, 1}, {10, 2}, {10, 3}};
  CHECK_THROWS_AS(fit_loglog(flat), InvalidArgument);
}

TEST_CASE("ks_one_sample") {
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_one_sample({0.5}, uniform) == doctest::Approx(0.5));
  CHECK(ks_one_sample({0.9, 0.1}, uniform) == doctest::Approx(0.4));
  CHECK(ks_one_sample({0.25, 0.75}, uniform) == doctest::Approx(0.25));
  CHECK_THROWS_AS(ks_one_sample({}, uniform), InvalidArgument);
  const std::vector<double> s{0.1, 0.9};
  const std::vector<double> c{0.1, 0.9};
  CHECK(ks_one_sample_sorted(s, c) == doctest::Approx(0.4));
}

TEST_CASE("ks_two_sample") {
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
  // Ties across samples: at x = 1, F_a = 1, F_b = 1/2.
  CHECK(ks_two_sample({1, 1}, {1, 2}) == doctest::Approx(0.5));
  CHECK(ks_two_sample({0.3, 0.1}, {0.2}) == ks_two_sample({0.2}, {0.1, 0.3}));
}

TEST_CASE("normal_cdf and median") {
  CHECK(normal_cdf(0.0, 2.0) == 0.5);
  CHECK(normal_cdf(1.0, 1.0) == doctest::Approx(0.8413447460685429));
  CHECK(normal_cdf(std::sqrt(0.5), 0.5) == doctest::Approx(0.8413447460685429));
  CHECK_THROWS_AS(normal_cdf(0.0, 0.0), InvalidArgument);
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), InvalidArgument);
}

TEST_CASE("total_variation") {
  const std::map<std::string, double> a{{"x", 0.5}, {"y", 0.5}};
  const std::map<std::string, double> b{{"x", 1.0}};
  const std::map<std::string, double> c{{"z", 1.0}};
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(a, b) == doctest::Approx(0.5));
  CHECK(total_variation(b, c) == doctest::Approx(1.0));
}

TEST_CASE("histogram") {
  const std::vector<double> v{-1.0, 0.0, 0.1, 0.5, 0.99, 1.0, 7.0};
  const auto h = histogram(v, 2, 0.0, 1.0);
  REQUIRE(h.size() == 2);
  CHECK(h[0].left == 0.0);
  CHECK(h[0].right == 0.5);
  CHECK(h[1].right == 1.0);
  CHECK(h[0].count == 3);
  CHECK(h[1].count == 4);
  CHECK_THROWS_AS(histogram(v, 0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(histogram(v, 2, 1.0, 1.0), InvalidArgument);
}
