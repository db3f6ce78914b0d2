#include "doctest.h"

#include <set>

#include "aniso/errors.hpp"
#include "aniso/verify.hpp"

using namespace aniso;
using namespace aniso::verify;
using nlohmann::json;

namespace {

json small_params(const std::string& name) {
  if (name == "equivalence") return {{"env", "comb"}, {"N", 3}};
  if (name == "timechange_bounds") return {{"paths", 20}, {"dt", 1e-3}};
  if (name == "inverse_law") return {{"paths", 2000}, {"dt", 1e-3}, {"threshold", 0.05}};
  if (name == "endpoint") return {{"N", 1000}, {"bm_replicas", 10000}, {"dt", 1e-3}, {"threshold", 0.05}};
  if (name == "endpoint_normal") return {{"N", 500}, {"replicas", 5000}, {"threshold", 0.05}};
  if (name == "horizontal_fraction") return {{"N", 10000}, {"replicas", 500}, {"threshold", 0.1}};
  if (name == "coupling") return {{"n_grid", "2^10..2^13"}, {"replicas", 50}};
  if (name == "abel") return {{"profiles", 20}};
  if (name == "increments") return {{"n_grid", "2^12..2^18"}, {"replicas", 40}, {"epsilon", 0.15}};
  if (name == "lil") return {{"kind", "walk_max"}, {"N", 65536}};
  if (name == "determinism") return {{"target", "abel"}, {"profiles", 5}, {"workers_b", 4}};
  return json::object();
}

}  // namespace

TEST_CASE("names") {
  const auto& base = test_names();
  const auto& plan = acceptance_names();
  CHECK(base.size() == 12);
  CHECK(plan.size() == 10);
  CHECK(plan.front() == "c1_equivalence");
  CHECK(plan.back() == "c10_determinism");
  CHECK(expand_suite("all") == plan);
  CHECK(expand_suite("abel,lil") == std::vector<std::string>{"abel", "lil"});
  CHECK_THROWS_AS(expand_suite("abel,nope"), UnknownTest);
  CHECK_THROWS_AS(expand_suite(""), UnknownTest);
  CHECK_THROWS_AS(run_test("nope", json::object(), {}), UnknownTest);
}

TEST_CASE("every base test runs with small parameters") {
  for (const auto& name : test_names()) {
    CAPTURE(name);
    const auto r = run_test(name, small_params(name), {3, 2});
    CHECK(r.test == name);
    CHECK(r.pass);
    CHECK(r.statistic <= r.threshold);
    const auto j = r.to_json();
    for (const char* key : {"test", "params", "statistic", "threshold", "pass", "points", "details"}) {
      CHECK(j.contains(key));
    }
    CHECK(j.at("params").is_object());
  }
}

TEST_CASE("resolved params are recorded") {
  const auto r = run_test("abel", {{"profiles", 7}}, {});
  CHECK(r.params.at("profiles") == 7);
  CHECK(r.params.at("threshold") == 1e-12);
  CHECK(r.params.at("max_levels") == 200);
  const auto s = run_test("coupling", small_params("coupling"), {});
  CHECK(s.points.size() == 4);
  CHECK(s.details.at("fit").contains("slope"));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(run_test("abel", json::array(), {}), InvalidArgument);
  CHECK_THROWS_AS(run_test("abel", {{"profiles", "many"}}, {}), InvalidArgument);
  CHECK_THROWS_AS(run_test("abel", {{"threshold", "x"}}, {}), InvalidArgument);
  CHECK_THROWS_AS(run_test("equivalence", {{"env", "nowhere"}, {"N", 2}}, {}), std::exception);
  CHECK_THROWS_AS(run_test("determinism", {{"target", "determinism"}}, {}), InvalidArgument);
  CHECK(run_test("abel", {{"profiles", "2^3"}}, {}).params.at("profiles") == 8);
}

TEST_CASE("regression test") {
  const auto r = run_test("regression", json::object(), {});
  CHECK(r.pass);
  CHECK(r.statistic < 1e-12);
  const auto h = run_test("regression", {{"points", {{4, 2}, {16, 4}, {64, 8}}}, {"expect_slope", 0.5}}, {});
  CHECK(h.pass);
  const auto f = run_test("regression", {{"points", {{4, 2}, {16, 4}, {64, 8}}}}, {});
  CHECK_FALSE(f.pass);
  CHECK(f.statistic == doctest::Approx(0.5));
}

TEST_CASE("reports are identical across worker counts and reruns") {
  for (const char* name : {"equivalence", "coupling", "increments", "horizontal_fraction"}) {
    const auto a = run_test(name, small_params(name), {11, 1}).to_json().dump();
    const auto b = run_test(name, small_params(name), {11, 5}).to_json().dump();
    const auto c = run_test(name, small_params(name), {11, 1}).to_json().dump();
    CHECK(a == b);
    CHECK(a == c);
  }
  const auto d = run_test("coupling", small_params("coupling"), {12, 1}).to_json().dump();
  CHECK(d != run_test("coupling", small_params("coupling"), {11, 1}).to_json().dump());
}

TEST_CASE("timechange_bounds counts violations") {
  const auto r = run_test("timechange_bounds", small_params("timechange_bounds"), {});
  CHECK(r.statistic == 0.0);
  CHECK(r.threshold == 0.0);
  CHECK(r.details.at("paths") == 20);
}

TEST_CASE("inverse_law reports total mass") {
  const auto r = run_test("inverse_law", small_params("inverse_law"), {});
  CHECK(std::abs(r.details.at("total_mass").get<double>() - 1.0) < 1e-6);
}

TEST_CASE("lil kinds") {
  const auto r = run_test("lil", {{"kind", "all"}, {"N", 65536}}, {4, 2});
  const auto& kinds = r.details.at("kinds");
  std::set<std::string> names;
  for (const auto& [k, v] : kinds.items()) names.insert(k);
  CHECK(names == std::set<std::string>{"c1", "c2", "local_time_max", "walk_max"});
  CHECK_THROWS_AS(run_test("lil", {{"kind", "sideways"}, {"N", 65536}}, {}), InvalidArgument);
}
