#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aniso/env.hpp"
#include "aniso/stats.hpp"
#include "aniso/walk.hpp"
#include "json.hpp"

namespace aniso::verify {

// ---------------------------------------------------------------------------
// Result types

struct GofReport {
  double ks_distance = 0.0;
  std::size_t n_samples = 0;
  std::string reference;
  double threshold = 0.0;
  bool pass = false;
};

struct AbelResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double max_abs_diff = 0.0;
};

/// Per-N medians over replicas and the log-log fit through them.
struct ScanResult {
  std::vector<std::uint64_t> n_grid;
  std::vector<double> medians;
  ExponentFit fit;
  double target_slope = 0.0;
  bool pass = false;
};

/// One one-sided LIL statistic followed along a trajectory.
struct LilTrack {
  std::string name;
  double target = 1.0;   // limiting constant, signed for lower tracks
  bool upper = true;     // running sup (limsup) or running inf (liminf)
  bool gated = true;     // counted toward the pass verdict
  std::vector<double> at_checkpoint;  // statistic / scaling at the checkpoint
  std::vector<double> running;        // extreme of statistic / scaling since n_start

  /// running extreme at the last checkpoint divided by the target.
  double final_normalized() const { return running.back() / target; }
};

enum class LilKind { walk_max, local_time_max, c1, c2 };

struct LilDiagnostic {
  LilKind kind = LilKind::walk_max;
  std::vector<std::uint64_t> checkpoints;
  std::vector<LilTrack> tracks;
  double band_lo = 0.3;
  double band_hi = 1.7;

  bool pass() const;
};

struct EquivalenceResult {
  double tv_distance = 0.0;
  std::size_t support_size = 0;
  std::uint64_t samples = 0;
};

struct BoundsResult {
  std::uint64_t paths = 0;
  std::uint64_t grid_points = 0;
  std::uint64_t monotone_violations = 0;   // A decreasing somewhere
  std::uint64_t excess_violations = 0;     // A(t) - t decreasing somewhere
  std::uint64_t lower_violations = 0;      // A(t) < gamma2 t
  std::uint64_t upper_violations = 0;      // A(t) > gamma1 t

  std::uint64_t total() const {
    return monotone_violations + excess_violations + lower_violations + upper_violations;
  }
};

struct InverseLawResult {
  GofReport gof;
  double total_mass = 0.0;
  double mass_tolerance = 1e-6;
  bool pass = false;
};

// ---------------------------------------------------------------------------
// Sample generators (replica r of stream `name` seeded by derive_seed(seed, name, r))

/// C2(N) / sqrt(N) over replicas of the direct walk.
std::vector<double> walk_endpoint_samples(const Environment& env, std::uint64_t steps, std::size_t replicas,
                                          std::uint64_t seed, unsigned workers);

/// Y(t) = W(A^{-1}(t)) over replicas of a grid Wiener path.
std::vector<double> oscillating_samples(double gamma1, double gamma2, double t, double dt, std::size_t replicas,
                                        std::uint64_t seed, unsigned workers);

/// A^{-1}(t) over replicas of a grid Wiener path.
std::vector<double> inverse_time_samples(double gamma1, double gamma2, double t, double dt, std::size_t replicas,
                                         std::uint64_t seed, unsigned workers);

/// Exact law of C(N) under the one-step transition kernel, by dynamic programming.
std::map<Point, double> exact_endpoint_law(const Environment& env, std::uint64_t steps);

// ---------------------------------------------------------------------------
// Verification operations

/// Summation by parts over levels j >= 1 of the profile. betas[j - 1] = beta_j for
/// j = 1..max_level + 1. Throws InvalidArgument on nonpositive beta.
AbelResult abel_identity_check(const LocalTimeProfile& profile, std::span<const double> betas, double rho);

/// Median over replicas of |N - A2hat(V_N)| per N, fitted in log-log. The pass
/// target is 5/4 - tau/2 + epsilon with tau from the environment unless overridden.
ScanResult coupling_error_scan(const Environment& env, std::span<const std::uint64_t> n_grid, std::size_t replicas,
                               std::uint64_t seed, unsigned workers, std::optional<double> tau = std::nullopt,
                               double epsilon = 0.1);

/// Two-sample KS between {C2(N)/sqrt(N)} and {Y(1)}.
GofReport endpoint_distribution_test(const Environment& env, std::uint64_t steps, std::size_t replicas,
                                     double gamma1, double gamma2, std::size_t bm_replicas, double dt,
                                     std::uint64_t seed, unsigned workers, double threshold = 0.03);

/// One-sample KS of {C2(N)/sqrt(N)} against normal(0, 1/gamma), for gamma1 = gamma2 = gamma.
GofReport endpoint_normal_test(const Environment& env, std::uint64_t steps, std::size_t replicas,
                               std::uint64_t seed, unsigned workers, double threshold = 0.02);

/// KS of {H_N/N} against the law of 1 - A^{-1}(1). With gamma1 = gamma2 the
/// statistic is max |H_N/N - (1 - 1/gamma)| compared against concentration_tol.
GofReport horizontal_fraction_test(const Environment& env, std::uint64_t steps, std::size_t replicas,
                                   std::uint64_t seed, unsigned workers, double threshold = 0.03,
                                   double concentration_tol = 0.02);

/// Median over replicas of sup_x |xi(x+1, n) - xi(x, n)| for a simple walk, fitted
/// in log-log; passes when the slope is at most 1/4 + epsilon.
ScanResult local_time_increment_scan(std::span<const std::uint64_t> n_grid, std::size_t replicas,
                                     std::uint64_t seed, unsigned workers, double epsilon = 0.1);

/// Dyadic checkpoints from n_start to n_max along one trajectory.
LilDiagnostic lil_diagnostics(LilKind kind, const Environment& env, std::uint64_t n_max, std::uint64_t seed,
                              std::uint64_t n_start = 1024);

/// TV distance between the exact law of C(N) and constructive-walk samples.
EquivalenceResult construction_equivalence_test(const Environment& env, std::uint64_t steps,
                                                std::uint64_t mc_samples, std::uint64_t seed, unsigned workers);

/// Least squares on (log N, log err); zero errs excluded; >= 3 usable points.
ExponentFit exponent_regression(std::span<const std::pair<double, double>> points);

/// Monotonicity of A and A(t) - t and the bounds gamma2 t <= A(t) <= gamma1 t at every grid point.
BoundsResult time_change_bounds_check(std::size_t paths, double horizon, double dt, double gamma1, double gamma2,
                                      std::uint64_t seed, unsigned workers);

/// KS of {A^{-1}(t)} against the integrated closed-form density, plus its total mass.
InverseLawResult inverse_law_test(std::size_t paths, double t, double dt, double gamma1, double gamma2,
                                  std::uint64_t seed, unsigned workers, double threshold = 0.02);

std::string_view to_string(LilKind kind);
LilKind lil_kind_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Named-test registry (the dispatch surface used by the C API and the CLI)

struct RunContext {
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

/// Serializable outcome of one named test.
struct Report {
  std::string test;
  nlohmann::json params = nlohmann::json::object();
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  nlohmann::json points = nlohmann::json::array();
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

/// Every registered test name, in dispatch order.
const std::vector<std::string>& test_names();

/// Acceptance plan entries run by the "all" suite.
const std::vector<std::string>& acceptance_names();

/// Runs one registered test or acceptance entry; missing params take defaults.
Report run_test(std::string_view name, const nlohmann::json& params, const RunContext& ctx);

/// Parses an N grid: "1024,2048", "2^10", or a dyadic range "2^10..2^20".
std::vector<std::uint64_t> parse_grid(std::string_view text);

/// Expands "all" to the acceptance plan; accepts comma-separated names.
std::vector<std::string> expand_suite(std::string_view suite);

}  // namespace aniso::verify
