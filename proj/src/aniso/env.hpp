#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace aniso {

enum class EnvironmentKind { uniform, comb, hphc, level_set, periodic, table };

std::string_view to_string(EnvironmentKind kind);

/// Closed level interval; a missing bound is unbounded on that side.
struct LevelInterval {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;

  bool contains(std::int64_t j) const { return (!lo || j >= *lo) && (!hi || j <= *hi); }
};

/// Declarative description of a vertical-level probability profile.
/// Only the fields relevant to `kind` are read.
struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::uniform;
  double p = 0.25;                                  // uniform
  std::vector<LevelInterval> set;                   // level_set: B as a union of intervals
  double p_in = 0.25;                               // level_set
  double p_out = 0.5;                               // level_set
  std::vector<double> period;                       // periodic: p(j) = period[j mod len]
  std::map<std::int64_t, double> levels;            // table
  double fallback = 0.5;                            // table default

  static EnvironmentSpec uniform(double p);
  static EnvironmentSpec comb();
  static EnvironmentSpec hphc();
  static EnvironmentSpec level_set(std::vector<LevelInterval> set, double p_in, double p_out);
  static EnvironmentSpec periodic(std::vector<double> values);
  static EnvironmentSpec table(std::map<std::int64_t, double> levels, double fallback);
};

/// Immutable profile j -> p(j). Cheap to copy and safe to share across threads.
class Environment {
 public:
  /// Wraps a spec without checking it. Use make_environment for checked construction.
  static Environment unvalidated(EnvironmentSpec spec);

  double p(std::int64_t level) const;

  EnvironmentKind kind() const { return spec_.kind; }
  const EnvironmentSpec& spec() const { return spec_; }
  bool mirrored() const { return mirrored_; }

  /// Environment with p'(j) = p(-j); swaps the roles of the two half-planes.
  Environment reflected() const;

  /// Every value the accessor can return, over all integers.
  std::vector<double> attainable_values() const;

  nlohmann::json to_json() const;
  std::string describe() const;

 private:
  explicit Environment(EnvironmentSpec spec, bool mirrored) : spec_(std::move(spec)), mirrored_(mirrored) {}
  double raw(std::int64_t level) const;

  EnvironmentSpec spec_;
  bool mirrored_ = false;
};

/// Checked construction: every attainable p in (0, 1/2] and at least one below 1/2.
Environment make_environment(const EnvironmentSpec& spec);

Environment environment_from_json(const nlohmann::json& doc);

/// Preset name ("comb", "hphc", "simple"), inline JSON document, or JSON file path.
Environment environment_from_string(std::string_view text);

struct ValidityVerdict {
  bool valid = true;
  std::optional<std::int64_t> offending_level;
  std::string reason;
};

/// Probes levels -probe_range..probe_range.
ValidityVerdict validate_environment(const Environment& env, std::int64_t probe_range);

struct CesaroProfile {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  std::optional<double> tau;              // fitted rate exponent; absent when residuals vanish
  std::vector<std::int64_t> residual_k;   // dyadic prefix lengths
  std::vector<double> residuals_pos;      // k^-1 sum_{j=1..k} 1/p(j) - 2 gamma1
  std::vector<double> residuals_neg;      // k^-1 sum_{j=1..k} 1/p(-j) - 2 gamma2
  bool swapped = false;                   // true if the input had gamma1 < gamma2

  /// Rate exponent used for error targets: fitted tau capped at 1, or 1 if absent.
  double effective_tau() const;
};

/// Pre: n_max >= 16. Orders the result so that gamma1 >= gamma2.
CesaroProfile cesaro_estimate(const Environment& env, std::int64_t n_max);

/// The environment oriented so that its upper half-plane carries the larger constant.
struct OrientedEnvironment {
  Environment env;
  CesaroProfile profile;
};

OrientedEnvironment orient(const Environment& env, std::int64_t n_max = 1 << 16);

}  // namespace aniso
