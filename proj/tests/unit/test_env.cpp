#include "doctest.h"

#include <cmath>
#include <fstream>

#include "aniso/env.hpp"
#include "aniso/errors.hpp"

using namespace aniso;

TEST_CASE("presets") {
  const auto simple = make_environment(EnvironmentSpec::uniform(0.25));
  const auto comb = make_environment(EnvironmentSpec::comb());
  const auto hphc = make_environment(EnvironmentSpec::hphc());
  for (std::int64_t j = -50; j <= 50; ++j) {
    CHECK(simple.p(j) == 0.25);
    CHECK(comb.p(j) == (j == 0 ? 0.25 : 0.5));
    CHECK(hphc.p(j) == (j >= 0 ? 0.25 : 0.5));
  }
}

TEST_CASE("make_environment rejects bad probabilities") {
  CHECK_THROWS_AS(make_environment(EnvironmentSpec::uniform(0.0)), InvalidEnvironment);
  CHECK_THROWS_AS(make_environment(EnvironmentSpec::uniform(0.6)), InvalidEnvironment);
  CHECK_THROWS_AS(make_environment(EnvironmentSpec::uniform(0.5)), InvalidEnvironment);
  CHECK_THROWS_AS(make_environment(EnvironmentSpec::periodic({0.5, 0.5})), InvalidEnvironment);
  try {
    make_environment(EnvironmentSpec::table({{0, 0.25}, {3, 0.6}}, 0.5));
    FAIL("expected rejection");
  } catch (const InvalidEnvironment& e) {
    REQUIRE(e.level());
    CHECK(*e.level() == 3);
  }
}

TEST_CASE("validate_environment") {
  const auto simple = make_environment(EnvironmentSpec::uniform(0.25));
  CHECK(validate_environment(simple, 100).valid);

  const auto flat = Environment::unvalidated(EnvironmentSpec::uniform(0.5));
  const auto v = validate_environment(flat, 10);
  CHECK_FALSE(v.valid);
  CHECK_FALSE(v.offending_level);

  const auto bad = Environment::unvalidated(EnvironmentSpec::table({{3, 0.6}, {0, 0.25}}, 0.5));
  const auto w = validate_environment(bad, 10);
  CHECK_FALSE(w.valid);
  REQUIRE(w.offending_level);
  CHECK(*w.offending_level == 3);

  CHECK_THROWS_AS(validate_environment(simple, 0), InvalidArgument);
}

TEST_CASE("level_set over the nonnegative integers reproduces hphc") {
  const auto ls = make_environment(EnvironmentSpec::level_set({{0, std::nullopt}}, 0.25, 0.5));
  const auto hphc = make_environment(EnvironmentSpec::hphc());
  for (std::int64_t j = -1000; j <= 1000; ++j) REQUIRE(ls.p(j) == hphc.p(j));
}

TEST_CASE("periodic and table accessors") {
  const auto per = make_environment(EnvironmentSpec::periodic({0.25, 0.5, 0.1}));
  CHECK(per.p(0) == 0.25);
  CHECK(per.p(4) == 0.5);
  CHECK(per.p(-1) == 0.1);
  CHECK(per.p(-3) == 0.25);
  const auto tab = make_environment(EnvironmentSpec::table({{0, 0.25}, {-3, 0.1}}, 0.5));
  CHECK(tab.p(0) == 0.25);
  CHECK(tab.p(-3) == 0.1);
  CHECK(tab.p(7) == 0.5);
}

TEST_CASE("environment JSON") {
  const auto env = environment_from_json(nlohmann::json::parse(R"({"kind": "table", "default": 0.5, "levels": {"0": 0.25, "-3": 0.1}})"));
  CHECK(env.p(-3) == 0.1);
  CHECK(env.p(0) == 0.25);
  CHECK(env.p(1) == 0.5);
  const auto again = environment_from_json(env.to_json());
  for (std::int64_t j = -5; j <= 5; ++j) CHECK(again.p(j) == env.p(j));

  CHECK(environment_from_json({{"kind", "hphc"}}).p(-1) == 0.5);
  CHECK(environment_from_string("comb").p(0) == 0.25);
  CHECK(environment_from_string(R"({"kind":"uniform","p":0.2})").p(9) == 0.2);
  CHECK(environment_from_string(R"({"kind":"level_set","set":[[null,-1]],"p_in":0.25})").p(-5) == 0.25);
  CHECK_THROWS_AS(environment_from_string("nonsense-preset"), InvalidEnvironment);
  CHECK_THROWS_AS(environment_from_string("{not json"), InvalidEnvironment);
  CHECK_THROWS_AS(environment_from_json({{"kind", "table"}, {"levels", {{"x", 0.2}}}}), InvalidEnvironment);

  const char* file = "env_test_tmp.json";
  {
    std::ofstream out(file);
    out << R"({"kind": "hphc"})";
  }
  CHECK(environment_from_string(file).p(-2) == 0.5);
  std::remove(file);
}

TEST_CASE("reflection mirrors levels") {
  const auto hphc = make_environment(EnvironmentSpec::hphc());
  const auto r = hphc.reflected();
  CHECK(r.mirrored());
  for (std::int64_t j = -10; j <= 10; ++j) CHECK(r.p(j) == hphc.p(-j));
  CHECK(environment_from_json(r.to_json()).p(3) == 0.5);
}

TEST_CASE("cesaro_estimate on presets") {
  SUBCASE("uniform(1/4): gamma = 2 exactly, residuals zero") {
    const auto p = cesaro_estimate(make_environment(EnvironmentSpec::uniform(0.25)), 1024);
    CHECK(p.gamma1 == 2.0);
    CHECK(p.gamma2 == 2.0);
    CHECK_FALSE(p.tau);
    for (double r : p.residuals_pos) CHECK(r == 0.0);
    for (double r : p.residuals_neg) CHECK(r == 0.0);
    CHECK(p.effective_tau() == 1.0);
  }
  SUBCASE("hphc: (2, 1)") {
    const auto p = cesaro_estimate(make_environment(EnvironmentSpec::hphc()), 1024);
    CHECK(p.gamma1 == 2.0);
    CHECK(p.gamma2 == 1.0);
    CHECK_FALSE(p.swapped);
  }
  SUBCASE("comb: gamma1 = gamma2 = 1") {
    const auto p = cesaro_estimate(make_environment(EnvironmentSpec::comb()), 1024);
    CHECK(p.gamma1 == 1.0);
    CHECK(p.gamma2 == 1.0);
  }
  SUBCASE("constant profiles are bit-identical across n_max") {
    const auto env = make_environment(EnvironmentSpec::hphc());
    CHECK(cesaro_estimate(env, 1024).gamma1 == cesaro_estimate(env, 2048).gamma1);
  }
  CHECK_THROWS_AS(cesaro_estimate(make_environment(EnvironmentSpec::hphc()), 8), InvalidArgument);
}

TEST_CASE("cesaro_estimate recovers gamma and tau for a sparse level set") {
  // p = 1/4 on multiples of 4 in j >= 1 and p = 1/2 elsewhere:
  // (1/n) sum 1/p -> 2 + 2/4 = 2.5, so gamma1 = 1.25, with O(1/n) residuals.
  std::vector<double> period{0.25, 0.5, 0.5, 0.5};
  const auto env = make_environment(EnvironmentSpec::periodic(period));
  const auto p = cesaro_estimate(env, 1 << 14);
  CHECK(p.gamma1 == doctest::Approx(1.25).epsilon(1e-6));
  CHECK(p.gamma2 == doctest::Approx(1.25).epsilon(1e-6));
}

TEST_CASE("cesaro_estimate with a decaying perturbation fits tau") {
  // 1/p_j = 3 + 2 j^{-1/2}: partial averages approach 3 at rate k^{-1/2}.
  std::map<std::int64_t, double> levels;
  for (std::int64_t j = 1; j <= 4096; ++j) levels[j] = 1.0 / (3.0 + 2.0 / std::sqrt(static_cast<double>(j)));
  const auto env = make_environment(EnvironmentSpec::table(levels, 0.5));
  const auto p = cesaro_estimate(env, 4096);
  CHECK(p.gamma1 == doctest::Approx(1.5).epsilon(2e-3));
  REQUIRE(p.tau);
  CHECK(*p.tau == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("gamma bounds and orientation swap") {
  const auto env = make_environment(EnvironmentSpec::level_set({{std::nullopt, -1}}, 0.25, 0.5));
  const auto p = cesaro_estimate(env, 1024);
  CHECK(p.swapped);
  CHECK(p.gamma1 == 2.0);
  CHECK(p.gamma2 == 1.0);
  const auto o = orient(env);
  CHECK(o.env.p(5) == 0.25);
  CHECK(o.env.p(-5) == 0.5);
  for (const auto& e : {EnvironmentSpec::comb(), EnvironmentSpec::hphc(), EnvironmentSpec::uniform(0.1)}) {
    const auto q = cesaro_estimate(make_environment(e), 1024);
    CHECK(q.gamma1 >= 1.0);
    CHECK(q.gamma2 >= 1.0);
  }
}
