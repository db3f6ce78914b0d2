#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

#include "aniso/errors.hpp"
#include "aniso/rng.hpp"
#include "aniso/verify.hpp"

namespace aniso::verify {

using nlohmann::json;

json Report::to_json() const {
  return {{"test", test},         {"params", params}, {"statistic", statistic}, {"threshold", threshold},
          {"pass", pass},         {"points", points}, {"details", details}};
}

namespace {

std::uint64_t parse_uint(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (const auto caret = text.find('^'); caret != std::string_view::npos) {
    const auto base = parse_uint(text.substr(0, caret));
    const auto exponent = parse_uint(text.substr(caret + 1));
    if (exponent > 62) throw InvalidArgument("grid exponent too large in '" + std::string(text) + "'");
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < exponent; ++i) {
      if (v > std::numeric_limits<std::uint64_t>::max() / std::max<std::uint64_t>(base, 1)) {
        throw InvalidArgument("grid value overflows: '" + std::string(text) + "'");
      }
      v *= base;
    }
    return v;
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("bad integer '" + std::string(text) + "' in grid");
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> parse_grid(std::string_view text) {
  std::vector<std::uint64_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_uint(item.substr(0, dots));
      const auto hi = parse_uint(item.substr(dots + 2));
      if (lo == 0 || hi < lo) throw InvalidArgument("bad grid range '" + std::string(item) + "'");
      for (std::uint64_t n = lo; n <= hi; n *= 2) {
        out.push_back(n);
        if (n > hi / 2) break;
      }
    } else {
      out.push_back(parse_uint(item));
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw InvalidArgument("empty N grid");
  return out;
}

namespace {

/// Reads parameters with defaults and records the resolved value of each.
class Params {
 public:
  explicit Params(const json& in) : in_(in.is_null() ? json::object() : in) {
    if (!in_.is_object()) throw InvalidArgument("test parameters must be a JSON object");
  }

  double num(const std::string& key, double fallback) {
    double v = fallback;
    if (in_.contains(key)) {
      const auto& x = in_.at(key);
      if (!x.is_number()) throw InvalidArgument("parameter '" + key + "' must be a number");
      v = x.get<double>();
    }
    resolved_[key] = v;
    return v;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    std::uint64_t v = fallback;
    if (in_.contains(key)) {
      const auto& x = in_.at(key);
      if (x.is_number_unsigned()) {
        v = x.get<std::uint64_t>();
      } else if (x.is_number_integer()) {
        if (x.get<std::int64_t>() < 0) throw InvalidArgument("parameter '" + key + "' must be nonnegative");
        v = x.get<std::uint64_t>();
      } else if (x.is_number_float()) {
        const double d = x.get<double>();
        if (d < 0 || d != std::floor(d) || d > 0x1.0p63) {
          throw InvalidArgument("parameter '" + key + "' must be a nonnegative integer");
        }
        v = static_cast<std::uint64_t>(d);
      } else if (x.is_string()) {
        v = parse_uint(x.get<std::string>());
      } else {
        throw InvalidArgument("parameter '" + key + "' must be an integer");
      }
    }
    resolved_[key] = v;
    return v;
  }

  std::optional<double> optional_num(const std::string& key) {
    if (!in_.contains(key) || in_.at(key).is_null()) {
      resolved_[key] = nullptr;
      return std::nullopt;
    }
    return num(key, 0.0);
  }

  std::string str(const std::string& key, const std::string& fallback) {
    std::string v = fallback;
    if (in_.contains(key)) {
      if (!in_.at(key).is_string()) throw InvalidArgument("parameter '" + key + "' must be a string");
      v = in_.at(key).get<std::string>();
    }
    resolved_[key] = v;
    return v;
  }

  std::vector<std::uint64_t> grid(const std::string& key, const std::string& fallback) {
    std::vector<std::uint64_t> v;
    if (!in_.contains(key)) {
      v = parse_grid(fallback);
    } else if (const auto& x = in_.at(key); x.is_string()) {
      v = parse_grid(x.get<std::string>());
    } else if (x.is_array()) {
      for (const auto& e : x) {
        if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) {
          throw InvalidArgument("parameter '" + key + "' must list positive integers");
        }
        v.push_back(e.get<std::uint64_t>());
      }
    } else {
      throw InvalidArgument("parameter '" + key + "' must be a grid string or an integer array");
    }
    resolved_[key] = v;
    return v;
  }

  Environment env(const std::string& fallback) {
    if (!in_.contains("env")) {
      resolved_["env"] = fallback;
      return environment_from_string(fallback);
    }
    const auto& x = in_.at("env");
    resolved_["env"] = x;
    if (x.is_string()) return environment_from_string(x.get<std::string>());
    return environment_from_json(x);
  }

  const json& input() const { return in_; }
  json resolved() const { return resolved_; }

 private:
  json in_;
  json resolved_ = json::object();
};

std::size_t as_size(std::uint64_t v) { return static_cast<std::size_t>(v); }

std::uint64_t stream_seed(const RunContext& ctx, std::string_view test) {
  return derive_seed(ctx.master_seed, test, 0);
}

json fit_json(const ExponentFit& fit) {
  json pts = json::array();
  for (const auto& [x, y] : fit.points) pts.push_back({x, y});
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}, {"log_points", pts}};
}

json gof_json(const GofReport& g) {
  return {{"ks_distance", g.ks_distance}, {"n_samples", g.n_samples}, {"reference", g.reference}};
}

Report scan_report(std::string name, Params& p, const ScanResult& scan) {
  Report r;
  r.test = std::move(name);
  r.statistic = scan.fit.slope;
  r.threshold = scan.target_slope;
  r.pass = scan.pass;
  for (std::size_t i = 0; i < scan.n_grid.size(); ++i) {
    r.points.push_back({{"N", scan.n_grid[i]}, {"median", scan.medians[i]}});
  }
  r.details["fit"] = fit_json(scan.fit);
  r.params = p.resolved();
  return r;
}

// ---------------------------------------------------------------------------
// Base tests

Report run_equivalence(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto env = p.env("hphc");
  const auto n = p.count("N", 5);
  const auto mc = p.count("mc_samples", 1000000);
  const double threshold = p.num("threshold", 0.01);
  const auto res = construction_equivalence_test(env, n, mc, stream_seed(ctx, "equivalence"), ctx.workers);
  Report r;
  r.test = "equivalence";
  r.statistic = res.tv_distance;
  r.threshold = threshold;
  r.pass = res.tv_distance <= threshold;
  r.details = {{"support_size", res.support_size}, {"samples", res.samples}};
  r.params = p.resolved();
  return r;
}

Report run_timechange_bounds(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto paths = p.count("paths", 1000);
  const double horizon = p.num("T", 1.0);
  const double dt = p.num("dt", 1e-4);
  const double g1 = p.num("g1", 2.0);
  const double g2 = p.num("g2", 1.0);
  const auto res = time_change_bounds_check(as_size(paths), horizon, dt, g1, g2,
                                            stream_seed(ctx, "timechange_bounds"), ctx.workers);
  Report r;
  r.test = "timechange_bounds";
  r.statistic = static_cast<double>(res.total());
  r.threshold = 0.0;
  r.pass = res.total() == 0;
  r.details = {{"paths", res.paths},
               {"grid_points", res.grid_points},
               {"monotone_violations", res.monotone_violations},
               {"excess_violations", res.excess_violations},
               {"lower_violations", res.lower_violations},
               {"upper_violations", res.upper_violations}};
  r.params = p.resolved();
  return r;
}

Report run_inverse_law(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto paths = p.count("paths", 100000);
  const double t = p.num("t", 1.0);
  const double dt = p.num("dt", 1e-4);
  const double g1 = p.num("g1", 2.0);
  const double g2 = p.num("g2", 1.0);
  const double threshold = p.num("threshold", 0.02);
  const auto res = inverse_law_test(as_size(paths), t, dt, g1, g2, stream_seed(ctx, "inverse_law"), ctx.workers,
                                    threshold);
  Report r;
  r.test = "inverse_law";
  r.statistic = res.gof.ks_distance;
  r.threshold = threshold;
  r.pass = res.pass;
  r.details = gof_json(res.gof);
  r.details["total_mass"] = res.total_mass;
  r.details["mass_tolerance"] = res.mass_tolerance;
  r.params = p.resolved();
  return r;
}

Report run_endpoint(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto env = p.env("hphc");
  const auto profile = orient(env).profile;
  const auto n = p.count("N", 10000);
  const auto replicas = p.count("replicas", 10000);
  const auto bm_replicas = p.count("bm_replicas", 100000);
  const double dt = p.num("dt", 1e-4);
  const double g1 = p.num("g1", profile.gamma1);
  const double g2 = p.num("g2", profile.gamma2);
  const double threshold = p.num("threshold", 0.03);
  const auto res = endpoint_distribution_test(env, n, as_size(replicas), g1, g2, as_size(bm_replicas), dt,
                                              stream_seed(ctx, "endpoint"), ctx.workers, threshold);
  Report r;
  r.test = "endpoint";
  r.statistic = res.ks_distance;
  r.threshold = threshold;
  r.pass = res.pass;
  r.details = gof_json(res);
  r.params = p.resolved();
  return r;
}

Report run_endpoint_normal(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto env = p.env("simple");
  const auto n = p.count("N", 10000);
  const auto replicas = p.count("replicas", 100000);
  const double threshold = p.num("threshold", 0.02);
  const auto res = endpoint_normal_test(env, n, as_size(replicas), stream_seed(ctx, "endpoint_normal"), ctx.workers,
                                        threshold);
  Report r;
  r.test = "endpoint_normal";
  r.statistic = res.ks_distance;
  r.threshold = threshold;
  r.pass = res.pass;
  r.details = gof_json(res);
  r.params = p.resolved();
  return r;
}

Report run_horizontal_fraction(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto env = p.env("hphc");
  const auto n = p.count("N", 100000);
  const auto replicas = p.count("replicas", 10000);
  const double threshold = p.num("threshold", 0.03);
  const double tol = p.num("concentration_tol", 0.02);
  const auto res = horizontal_fraction_test(env, n, as_size(replicas), stream_seed(ctx, "horizontal_fraction"),
                                            ctx.workers, threshold, tol);
  Report r;
  r.test = "horizontal_fraction";
  r.statistic = res.ks_distance;
  r.threshold = res.threshold;
  r.pass = res.pass;
  r.details = gof_json(res);
  r.params = p.resolved();
  return r;
}

Report run_coupling(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto env = p.env("hphc");
  const auto grid = p.grid("n_grid", "2^10..2^20");
  const auto replicas = p.count("replicas", 200);
  const auto tau = p.optional_num("tau");
  const double epsilon = p.num("epsilon", 0.1);
  const auto scan = coupling_error_scan(env, grid, as_size(replicas), stream_seed(ctx, "coupling"), ctx.workers, tau,
                                        epsilon);
  return scan_report("coupling", p, scan);
}

Report run_increments(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto grid = p.grid("n_grid", "2^10..2^22");
  const auto replicas = p.count("replicas", 100);
  const double epsilon = p.num("epsilon", 0.1);
  const auto scan = local_time_increment_scan(grid, as_size(replicas), stream_seed(ctx, "increments"), ctx.workers,
                                              epsilon);
  return scan_report("increments", p, scan);
}

Report run_abel(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto profiles = p.count("profiles", 1000);
  const double threshold = p.num("threshold", 1e-12);
  const auto max_levels = p.count("max_levels", 200);
  if (max_levels == 0) throw InvalidArgument("abel: max_levels must be positive");
  double worst = 0.0;
  for (std::uint64_t i = 0; i < profiles; ++i) {
    Rng rng(derive_seed(stream_seed(ctx, "abel"), "abel/profile", i));
    const auto top = static_cast<std::int64_t>(1 + rng.next() % max_levels);
    std::map<std::int64_t, std::uint64_t> counts;
    counts[1] = 1 + rng.next() % 10000;
    for (std::int64_t j = 2; j <= top; ++j) counts[j] = rng.next() % 10001;
    std::vector<double> betas(static_cast<std::size_t>(top + 1));
    for (auto& b : betas) b = 0.05 + 0.95 * rng.uniform_open();
    const double rho = 0.5 + 3.5 * rng.uniform_open();
    const auto res = abel_identity_check(LocalTimeProfile::from_counts(counts), betas, rho);
    worst = std::max(worst, res.max_abs_diff / std::max({std::abs(res.lhs), std::abs(res.rhs), 1.0}));
  }
  Report r;
  r.test = "abel";
  r.statistic = worst;
  r.threshold = threshold;
  r.pass = worst <= threshold;
  r.details = {{"profiles", profiles}, {"statistic_kind", "max relative |lhs - rhs|"}};
  r.params = p.resolved();
  return r;
}

json track_json(const LilTrack& t, const LilDiagnostic& d) {
  return {{"name", t.name},
          {"target", t.target},
          {"upper", t.upper},
          {"gated", t.gated},
          {"at_checkpoint", t.at_checkpoint},
          {"running", t.running},
          {"final_normalized", t.final_normalized()},
          {"within_band", t.final_normalized() >= d.band_lo && t.final_normalized() <= d.band_hi}};
}

Report run_lil(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto kind_name = p.str("kind", "all");
  const auto env = p.env("hphc");
  const auto n_max = p.count("N", std::uint64_t{1} << 24);
  const auto n_start = p.count("n_start", 1024);
  std::vector<LilKind> kinds;
  if (kind_name == "all") {
    kinds = {LilKind::walk_max, LilKind::local_time_max, LilKind::c1, LilKind::c2};
  } else {
    kinds = {lil_kind_from_string(kind_name)};
  }
  Report r;
  r.test = "lil";
  r.threshold = 0.7;  // |final / target - 1| <= 0.7, i.e. the band [0.3, 1.7]
  double worst = 0.0;
  bool pass = true;
  json per_kind = json::object();
  for (const auto kind : kinds) {
    const std::string name(to_string(kind));
    const auto diag = lil_diagnostics(kind, env, n_max, derive_seed(stream_seed(ctx, "lil"), name, 0), n_start);
    pass = pass && diag.pass();
    json tracks = json::array();
    for (const auto& t : diag.tracks) {
      tracks.push_back(track_json(t, diag));
      if (t.gated) worst = std::max(worst, std::abs(t.final_normalized() - 1.0));
      r.points.push_back({{"kind", name}, {"track", t.name}, {"final_normalized", t.final_normalized()}});
    }
    per_kind[name] = {{"checkpoints", diag.checkpoints}, {"tracks", tracks}, {"pass", diag.pass()}};
  }
  r.statistic = worst;
  r.pass = pass;
  r.details = {{"band", {0.3, 1.7}}, {"kinds", per_kind}};
  r.params = p.resolved();
  return r;
}

Report run_regression(const json& in, const RunContext&) {
  Params p(in);
  std::vector<std::pair<double, double>> pts{{10, 10}, {100, 100}, {1000, 1000}};
  if (p.input().contains("points")) {
    pts.clear();
    for (const auto& e : p.input().at("points")) {
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("regression: points must be [N, err] pairs");
      pts.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  json echoed = json::array();
  for (const auto& [x, y] : pts) echoed.push_back({x, y});
  const double expect = p.num("expect_slope", 1.0);
  const double tol = p.num("threshold", 1e-9);
  const auto fit = exponent_regression(pts);
  Report r;
  r.test = "regression";
  r.statistic = std::abs(fit.slope - expect);
  r.threshold = tol;
  r.pass = r.statistic <= tol;
  r.details["fit"] = fit_json(fit);
  for (const auto& [x, y] : pts) r.points.push_back({{"N", x}, {"err", y}});
  r.params = p.resolved();
  r.params["points"] = echoed;
  return r;
}

Report run_determinism(const json& in, const RunContext& ctx) {
  Params p(in);
  const auto target = p.str("target", "c4_endpoint_law");
  const auto wide = static_cast<unsigned>(p.count("workers_b", 8));
  json sub = p.input();
  sub.erase("target");
  sub.erase("workers_b");
  if (target == "determinism") throw InvalidArgument("determinism: target cannot be itself");
  const auto a = run_test(target, sub, {ctx.master_seed, 1}).to_json().dump();
  const auto b = run_test(target, sub, {ctx.master_seed, wide}).to_json().dump();
  Report r;
  r.test = "determinism";
  r.statistic = a == b ? 0.0 : 1.0;
  r.threshold = 0.0;
  r.pass = a == b;
  r.details = {{"workers", {1, wide}}, {"bytes", a.size()}, {"fnv1a64", fnv1a64(a)}};
  r.params = p.resolved();
  return r;
}

// ---------------------------------------------------------------------------
// Acceptance plan. Each entry runs its pinned base tests; a composite reports
// max(statistic / threshold) over its parts, and passes only if all parts do.

Report composite(std::string name, const std::vector<Report>& parts) {
  Report r;
  r.test = std::move(name);
  r.threshold = 1.0;
  r.pass = true;
  json sub = json::array();
  for (const auto& part : parts) {
    const double ratio = part.threshold > 0.0 ? part.statistic / part.threshold : (part.statistic > 0.0 ? 2.0 : 0.0);
    r.statistic = std::max(r.statistic, ratio);
    r.pass = r.pass && part.pass;
    sub.push_back(part.to_json());
  }
  r.details["parts"] = sub;
  return r;
}

Report run_c1(const json&, const RunContext& ctx) {
  std::vector<Report> parts;
  for (const char* env : {"comb", "hphc", "simple"}) {
    parts.push_back(run_equivalence({{"env", env}, {"N", 5}, {"mc_samples", 1000000}, {"threshold", 0.01}}, ctx));
  }
  return composite("c1_equivalence", parts);
}

Report run_c2(const json&, const RunContext& ctx) {
  return composite("c2_timechange_bounds",
                   {run_timechange_bounds({{"paths", 1000}, {"T", 1.0}, {"dt", 1e-4}, {"g1", 2.0}, {"g2", 1.0}}, ctx)});
}

Report run_c3(const json&, const RunContext& ctx) {
  return composite("c3_inverse_law", {run_inverse_law({{"paths", 100000},
                                                       {"t", 1.0},
                                                       {"dt", 1e-4},
                                                       {"g1", 2.0},
                                                       {"g2", 1.0},
                                                       {"threshold", 0.02}},
                                                      ctx)});
}

Report run_c4(const json&, const RunContext& ctx) {
  return composite("c4_endpoint_law",
                   {run_endpoint({{"env", "hphc"},
                                  {"N", 10000},
                                  {"replicas", 10000},
                                  {"bm_replicas", 100000},
                                  {"dt", 1e-4},
                                  {"threshold", 0.03}},
                                 ctx),
                    run_endpoint_normal({{"env", "simple"}, {"N", 10000}, {"replicas", 100000}, {"threshold", 0.02}},
                                        ctx)});
}

Report run_c5(const json&, const RunContext& ctx) {
  return composite("c5_horizontal_fraction",
                   {run_horizontal_fraction({{"env", "hphc"}, {"N", 100000}, {"replicas", 10000}, {"threshold", 0.03}},
                                            ctx)});
}

Report run_c6(const json&, const RunContext& ctx) {
  return composite("c6_coupling_exponent",
                   {run_coupling({{"env", "hphc"}, {"n_grid", "2^10..2^20"}, {"replicas", 200}, {"epsilon", 0.1}},
                                 ctx)});
}

Report run_c7(const json&, const RunContext& ctx) {
  return composite("c7_abel_identity", {run_abel({{"profiles", 1000}, {"threshold", 1e-12}}, ctx)});
}

Report run_c8(const json&, const RunContext& ctx) {
  return composite("c8_increment_exponent",
                   {run_increments({{"n_grid", "2^10..2^22"}, {"replicas", 100}, {"epsilon", 0.1}}, ctx)});
}

Report run_c9(const json&, const RunContext& ctx) {
  return composite("c9_lil", {run_lil({{"kind", "all"}, {"env", "hphc"}, {"N", std::uint64_t{1} << 24}}, ctx)});
}

Report run_c10(const json&, const RunContext& ctx) {
  return composite("c10_determinism", {run_determinism({{"target", "c4_endpoint_law"}, {"workers_b", 8}}, ctx)});
}

using Runner = std::function<Report(const json&, const RunContext&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> table{
      {"equivalence", run_equivalence},
      {"timechange_bounds", run_timechange_bounds},
      {"inverse_law", run_inverse_law},
      {"endpoint", run_endpoint},
      {"endpoint_normal", run_endpoint_normal},
      {"horizontal_fraction", run_horizontal_fraction},
      {"coupling", run_coupling},
      {"abel", run_abel},
      {"increments", run_increments},
      {"lil", run_lil},
      {"regression", run_regression},
      {"determinism", run_determinism},
      {"c1_equivalence", run_c1},
      {"c2_timechange_bounds", run_c2},
      {"c3_inverse_law", run_c3},
      {"c4_endpoint_law", run_c4},
      {"c5_horizontal_fraction", run_c5},
      {"c6_coupling_exponent", run_c6},
      {"c7_abel_identity", run_c7},
      {"c8_increment_exponent", run_c8},
      {"c9_lil", run_c9},
      {"c10_determinism", run_c10},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& test_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, runner] : registry()) {
      if (name.size() < 2 || name[0] != 'c' || !std::isdigit(static_cast<unsigned char>(name[1]))) {
        out.push_back(name);
      }
    }
    return out;
  }();
  return names;
}

const std::vector<std::string>& acceptance_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, runner] : registry()) {
      if (name.size() >= 2 && name[0] == 'c' && std::isdigit(static_cast<unsigned char>(name[1]))) {
        out.push_back(name);
      }
    }
    return out;
  }();
  return names;
}

Report run_test(std::string_view name, const json& params, const RunContext& ctx) {
  for (const auto& [key, runner] : registry()) {
    if (key == name) return runner(params, ctx);
  }
  throw UnknownTest("unknown test '" + std::string(name) + "'");
}

std::vector<std::string> expand_suite(std::string_view suite) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = suite.find(',');
    const std::string item(suite.substr(0, comma));
    if (item == "all") {
      out.insert(out.end(), acceptance_names().begin(), acceptance_names().end());
    } else if (!item.empty()) {
      bool known = false;
      for (const auto& [key, runner] : registry()) known = known || key == item;
      if (!known) throw UnknownTest("unknown test '" + item + "'");
      out.push_back(item);
    }
    if (comma == std::string_view::npos) break;
    suite.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UnknownTest("empty test suite");
  return out;
}

}  // namespace aniso::verify
