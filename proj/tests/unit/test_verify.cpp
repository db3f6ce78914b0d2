#include "doctest.h"

#include <cmath>

#include "aniso/errors.hpp"
#include "aniso/verify.hpp"

using namespace aniso;
using namespace aniso::verify;

namespace {

const Environment& hphc() {
  static const auto env = make_environment(EnvironmentSpec::hphc());
  return env;
}

const Environment& simple() {
  static const auto env = make_environment(EnvironmentSpec::uniform(0.25));
  return env;
}

Environment degenerate() { return Environment::unvalidated(EnvironmentSpec::uniform(0.5)); }

}  // namespace

TEST_CASE("abel identity on hand profiles") {
  // Constant beta: kappa_j = rho and the correction vanishes.
  const auto p = LocalTimeProfile::from_counts({{1, 3}, {2, 2}, {3, 1}, {-1, 4}});
  const std::vector<double> ones(4, 1.0);
  const auto a = abel_identity_check(p, ones, 1.0);
  CHECK(a.lhs == 6.0);
  CHECK(a.rhs == 6.0);
  CHECK(a.max_abs_diff == 0.0);

  // xi(1) = 3, xi(2) = 1, beta = (1, 2, 1), rho = 1: lhs = 3 + 1/2, rhs = 4 + 2 (3/4 - 1)(1 - 0).
  const auto q = LocalTimeProfile::from_counts({{1, 3}, {2, 1}});
  const std::vector<double> betas{1.0, 2.0, 1.0};
  const auto b = abel_identity_check(q, betas, 1.0);
  CHECK(b.lhs == doctest::Approx(3.5));
  CHECK(b.rhs == doctest::Approx(3.5));

  // The identity holds for any rho.
  const auto c = abel_identity_check(q, betas, 0.3);
  CHECK(c.max_abs_diff < 1e-12);

  CHECK(abel_identity_check(LocalTimeProfile{}, betas, 1.0).lhs == 0.0);
  CHECK_THROWS_AS(abel_identity_check(q, std::vector<double>{1.0}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(abel_identity_check(q, std::vector<double>{1.0, 0.0, 1.0}, 1.0), InvalidArgument);
}

TEST_CASE("abel identity on random profiles") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto p = simple_walk_local_time(5000, derive_seed(11, "abel_unit", s));
    Rng rng(s);
    std::vector<double> betas(static_cast<std::size_t>(std::max<std::int64_t>(p.max_level(), 0) + 1));
    for (auto& b : betas) b = 2.0 + 4.0 * rng.uniform_open();
    const auto r = abel_identity_check(p, betas, 3.0);
    CHECK(r.max_abs_diff <= 1e-9 * std::max(1.0, std::abs(r.lhs)));
  }
}

TEST_CASE("exact endpoint law is a probability law") {
  for (std::uint64_t n : {0u, 1u, 3u, 6u}) {
    const auto law = exact_endpoint_law(hphc(), n);
    double total = 0.0;
    for (const auto& [pt, pr] : law) {
      total += pr;
      CHECK(std::abs(pt.x) + std::abs(pt.y) <= static_cast<std::int64_t>(n));
      CHECK((pt.x + pt.y - static_cast<std::int64_t>(n)) % 2 == 0);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(exact_endpoint_law(hphc(), 0).size() == 1);
}

TEST_CASE("construction equivalence") {
  const auto zero = construction_equivalence_test(hphc(), 0, 1000000, 1, 2);
  CHECK(zero.tv_distance == 0.0);
  CHECK(zero.support_size == 1);
  const auto r = construction_equivalence_test(hphc(), 4, 1000000, 1, 2);
  CHECK(r.tv_distance < 0.01);
  CHECK_THROWS_AS(construction_equivalence_test(hphc(), 9, 1000000, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(construction_equivalence_test(hphc(), 2, 999999, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(construction_equivalence_test(degenerate(), 2, 1000000, 1, 1), InvalidEnvironment);
}

TEST_CASE("sample generators are deterministic across worker counts") {
  CHECK(walk_endpoint_samples(hphc(), 500, 64, 3, 1) == walk_endpoint_samples(hphc(), 500, 64, 3, 4));
  CHECK(oscillating_samples(2.0, 1.0, 1.0, 1e-2, 32, 3, 1) == oscillating_samples(2.0, 1.0, 1.0, 1e-2, 32, 3, 3));
  CHECK(inverse_time_samples(2.0, 1.0, 1.0, 1e-2, 32, 3, 1) == inverse_time_samples(2.0, 1.0, 1.0, 1e-2, 32, 3, 5));
  const auto inv = inverse_time_samples(2.0, 1.0, 1.0, 1e-3, 200, 4, 2);
  for (double v : inv) {
    CHECK(v >= 0.5 - 1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("simple walk endpoint is symmetric and normal") {
  const auto s = walk_endpoint_samples(simple(), 2000, 20000, 5, 2);
  std::vector<double> neg(s.size());
  std::transform(s.begin(), s.end(), neg.begin(), [](double x) { return -x; });
  CHECK(ks_two_sample(s, neg) < 0.03);
  const auto r = endpoint_normal_test(simple(), 2000, 20000, 5, 2);
  CHECK(r.ks_distance < 0.02);
  CHECK(r.pass);
  CHECK_THROWS_AS(endpoint_normal_test(hphc(), 2000, 20000, 5, 2), InvalidArgument);
}

TEST_CASE("endpoint distribution preconditions") {
  CHECK_THROWS_AS(endpoint_distribution_test(hphc(), 999, 10000, 2.0, 1.0, 10000, 1e-3, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(endpoint_distribution_test(hphc(), 1000, 9999, 2.0, 1.0, 10000, 1e-3, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(endpoint_distribution_test(degenerate(), 1000, 10000, 2.0, 1.0, 10000, 1e-3, 0, 1),
                  InvalidEnvironment);
}

TEST_CASE("horizontal fraction concentrates for equal constants") {
  const auto r = horizontal_fraction_test(simple(), 20000, 200, 6, 2);
  CHECK(r.threshold == 0.02);
  CHECK(r.ks_distance < 0.02);
  CHECK_THROWS_AS(horizontal_fraction_test(simple(), 9999, 10, 6, 1), InvalidArgument);
}

TEST_CASE("small scans") {
  const auto grid = parse_grid("2^10..2^14");
  const auto c = coupling_error_scan(hphc(), grid, 60, 7, 2);
  CHECK(c.medians.size() == grid.size());
  CHECK(c.target_slope == doctest::Approx(1.25 - 0.5 + 0.1));
  CHECK(c.fit.slope > 0.0);
  CHECK(c.fit.slope < 1.0);
  CHECK(coupling_error_scan(hphc(), grid, 60, 7, 2, 0.0).target_slope == doctest::Approx(1.35));
  CHECK_THROWS_AS(coupling_error_scan(hphc(), grid, 49, 7, 1), InvalidArgument);
  const std::vector<std::uint64_t> bad{1000, 2048, 4096};
  CHECK_THROWS_AS(coupling_error_scan(hphc(), bad, 60, 7, 1), InvalidArgument);

  const auto li = local_time_increment_scan(parse_grid("2^8..2^16"), 60, 7, 2);
  CHECK(li.target_slope == doctest::Approx(0.35));
  CHECK(li.fit.slope > 0.1);
  CHECK(li.fit.slope < 0.45);
  const auto a = local_time_increment_scan(grid, 10, 8, 1);
  const auto b = local_time_increment_scan(grid, 10, 8, 6);
  CHECK(a.medians == b.medians);
}

TEST_CASE("exponent regression") {
  const std::vector<std::pair<double, double>> pts{{10, 10}, {100, 100}, {1000, 1000}};
  CHECK(exponent_regression(pts).slope == doctest::Approx(1.0));
  const std::vector<std::pair<double, double>> two{{10, 10}, {100, 100}};
  CHECK_THROWS_AS(exponent_regression(two), InvalidArgument);
}

TEST_CASE("time change bounds") {
  const auto r = time_change_bounds_check(50, 1.0, 1e-3, 2.0, 1.0, 9, 3);
  CHECK(r.paths == 50);
  CHECK(r.grid_points == 50 * 1001);
  CHECK(r.total() == 0);
  CHECK(time_change_bounds_check(5, 2.0, 1e-2, 1.0, 1.0, 9, 1).total() == 0);
}

TEST_CASE("inverse law") {
  const auto r = inverse_law_test(5000, 1.0, 1e-3, 2.0, 1.0, 10, 2);
  CHECK(std::abs(r.total_mass - 1.0) < 1e-6);
  CHECK(r.gof.ks_distance < 0.04);
}

TEST_CASE("lil diagnostics shape") {
  const auto d = lil_diagnostics(LilKind::walk_max, hphc(), 1 << 16, 12, 1024);
  CHECK(d.checkpoints.size() == 7);
  CHECK(d.checkpoints.front() == 1024);
  CHECK(d.checkpoints.back() == 1 << 16);
  for (const auto& t : d.tracks) {
    CHECK(t.running.size() == d.checkpoints.size());
    for (std::size_t i = 1; i < t.running.size(); ++i) {
      if (t.upper) CHECK(t.running[i] >= t.running[i - 1]);
      else CHECK(t.running[i] <= t.running[i - 1]);
    }
  }
  const auto c2 = lil_diagnostics(LilKind::c2, hphc(), 1 << 16, 12, 1024);
  REQUIRE(c2.tracks.size() == 2);
  CHECK(c2.tracks[0].target == doctest::Approx(std::sqrt(2.0 / 2.0)));
  CHECK(c2.tracks[1].target == doctest::Approx(-std::sqrt(2.0 / 1.0)));
  CHECK_THROWS_AS(lil_diagnostics(LilKind::c1, hphc(), 1 << 15, 1), InvalidArgument);
  CHECK_THROWS_AS(lil_diagnostics(LilKind::c1, hphc(), 1 << 16, 1, 1000), InvalidArgument);
  CHECK_THROWS_AS(lil_diagnostics(LilKind::c1, make_environment(EnvironmentSpec::comb()), 1 << 16, 1),
                  InvalidArgument);
  CHECK(lil_kind_from_string("local_time_max") == LilKind::local_time_max);
  CHECK(to_string(LilKind::c1) == "c1");
}

TEST_CASE("parse_grid") {
  CHECK(parse_grid("1024,2048") == std::vector<std::uint64_t>{1024, 2048});
  CHECK(parse_grid("2^3") == std::vector<std::uint64_t>{8});
  CHECK(parse_grid("2^2..2^5") == std::vector<std::uint64_t>{4, 8, 16, 32});
  CHECK_THROWS_AS(parse_grid(""), InvalidArgument);
  CHECK_THROWS_AS(parse_grid("2^5..2^2"), InvalidArgument);
  CHECK_THROWS_AS(parse_grid("abc"), InvalidArgument);
}
