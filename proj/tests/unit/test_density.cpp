#include "doctest.h"

#include <cmath>
#include <numbers>
#include <tuple>

#include "aniso/density.hpp"
#include "aniso/errors.hpp"

using namespace aniso;

namespace {

// CDF of A^{-1}(t) in closed form: with v = m + r sin(theta) on (a, b) the
// integrand reduces to s / (pi (m + r sin(theta))), s = sqrt(a b).
double arctan_cdf(double t, double g1, double g2, double v) {
  const double a = t / g1;
  const double b = t / g2;
  if (v <= a) return 0.0;
  if (v >= b) return 1.0;
  const double m = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double s = t / std::sqrt(g1 * g2);
  const double theta = std::asin((v - m) / r);
  return (2.0 / std::numbers::pi) * (std::atan((m * std::tan(theta / 2) + r) / s) - std::atan((r - m) / s));
}

}  // namespace

TEST_CASE("inverse density check values") {
  const auto spec = make_density_spec(1.0, 2.0, 1.0, DensityVariant::inverse);
  CHECK(spec.support_lo() == 0.5);
  CHECK(spec.support_hi() == 1.0);
  CHECK(inverse_density(spec, 0.75) == doctest::Approx(1.2004).epsilon(1e-4));
  CHECK(inverse_density(spec, 0.4) == 0.0);
  CHECK(inverse_density(spec, 1.2) == 0.0);
  CHECK_THROWS_AS(inverse_density(spec, 0.5), Singularity);
  CHECK_THROWS_AS(inverse_density(spec, 1.0), Singularity);
}

TEST_CASE("complement density mirrors the inverse density") {
  for (auto [t, g1, g2] : {std::tuple{1.0, 2.0, 1.0}, std::tuple{2.5, 3.0, 1.5}, std::tuple{0.7, 1.2, 1.1}}) {
    const auto inv = make_density_spec(t, g1, g2, DensityVariant::inverse);
    const auto cmp = make_density_spec(t, g1, g2, DensityVariant::complement);
    CHECK(cmp.support_lo() == doctest::Approx(t * (1 - 1 / g2)));
    CHECK(cmp.support_hi() == doctest::Approx(t * (1 - 1 / g1)));
    for (int i = 1; i < 20; ++i) {
      const double v = cmp.support_lo() + (cmp.support_hi() - cmp.support_lo()) * i / 20.0;
      CHECK(complement_density(cmp, v) == doctest::Approx(inverse_density(inv, t - v)).epsilon(1e-12));
      CHECK(density(cmp, v) == complement_density(cmp, v));
      CHECK(density_cdf(cmp, v) == doctest::Approx(1.0 - density_cdf(inv, t - v)).epsilon(1e-9));
    }
  }
}

TEST_CASE("cdf against the arctan closed form") {
  for (auto [t, g1, g2] : {std::tuple{1.0, 2.0, 1.0}, std::tuple{3.0, 4.0, 1.0}, std::tuple{1.0, 1.01, 1.0}}) {
    const auto spec = make_density_spec(t, g1, g2, DensityVariant::inverse);
    const double a = spec.support_lo();
    const double b = spec.support_hi();
    for (int i = -2; i <= 52; ++i) {
      const double v = a + (b - a) * i / 50.0;
      CHECK(density_cdf(spec, v) == doctest::Approx(arctan_cdf(t, g1, g2, v)).epsilon(1e-9));
    }
  }
}

TEST_CASE("total mass is 1") {
  for (auto variant : {DensityVariant::inverse, DensityVariant::complement}) {
    for (auto [t, g1, g2] : {std::tuple{1.0, 2.0, 1.0}, std::tuple{5.0, 10.0, 1.0}, std::tuple{1.0, 1.5, 1.4}}) {
      CHECK(std::abs(density_total_mass(make_density_spec(t, g1, g2, variant)) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("density_cdf_sorted agrees with density_cdf") {
  const auto spec = make_density_spec(1.0, 2.0, 1.0, DensityVariant::inverse);
  std::vector<double> pts{0.1, 0.5, 0.5, 0.51, 0.6, 0.75, 0.75, 0.9, 0.999, 1.0, 1.3};
  const auto batch = density_cdf_sorted(spec, pts);
  REQUIRE(batch.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(batch[i] == doctest::Approx(density_cdf(spec, pts[i])).epsilon(1e-10));
  CHECK(density_cdf_sorted(spec, std::vector<double>{}).empty());
}

TEST_CASE("point mass") {
  const auto spec = make_density_spec(2.0, 1.5, 1.5, DensityVariant::inverse);
  CHECK(spec.point_mass());
  CHECK_THROWS_AS(density(spec, 1.0), DegenerateLaw);
  CHECK(density_cdf(spec, 4.0 / 3.0 - 1e-9) == 0.0);
  CHECK(density_cdf(spec, 4.0 / 3.0 + 1e-9) == 1.0);
  CHECK_THROWS_AS(density_table(spec, 10), DegenerateLaw);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_density_spec(0.0, 2.0, 1.0, DensityVariant::inverse), InvalidArgument);
  CHECK_THROWS_AS(make_density_spec(1.0, 1.0, 2.0, DensityVariant::inverse), InvalidArgument);
  CHECK_THROWS_AS(make_density_spec(1.0, 2.0, 0.5, DensityVariant::inverse), InvalidArgument);
  CHECK(density_variant_from_string("complement") == DensityVariant::complement);
  CHECK_THROWS_AS(density_variant_from_string("x"), InvalidArgument);
}

TEST_CASE("density table") {
  const auto spec = make_density_spec(1.0, 2.0, 1.0, DensityVariant::inverse);
  const auto rows = density_table(spec, 101);
  REQUIRE(rows.size() == 101);
  CHECK(rows.front().v == 0.5);
  CHECK(rows.back().v == 1.0);
  CHECK(std::isinf(rows.front().pdf));
  CHECK(std::isinf(rows.back().pdf));
  CHECK(rows.front().cdf == 0.0);
  CHECK(rows.back().cdf == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].v > rows[i - 1].v);
    CHECK(rows[i].cdf >= rows[i - 1].cdf);
  }
  CHECK_THROWS_AS(density_table(spec, 1), InvalidArgument);
}
