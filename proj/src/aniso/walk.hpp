#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aniso/env.hpp"
#include "aniso/rng.hpp"
#include "json.hpp"

namespace aniso {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const Point&, const Point&) = default;
};

enum class StepKind : std::uint8_t { horizontal, vertical };

enum class WalkMethod { direct, constructive };

/// Longest path kept in memory; longer runs go through simulate_summary.
inline constexpr std::uint64_t kMaxStoredSteps = std::uint64_t{1} << 26;

/// Visit counts xi(j, n) = #{k in 1..n : S(k) = j}, stored densely over the visited range.
class LocalTimeProfile {
 public:
  LocalTimeProfile() = default;
  static LocalTimeProfile from_counts(const std::map<std::int64_t, std::uint64_t>& counts);

  void add(std::int64_t level, std::uint64_t count = 1) {
    if (count == 0) return;
    if (counts_.empty()) {
      base_ = level - 8;
      counts_.assign(17, 0);
      lo_ = hi_ = level;
    } else if (level < base_ || level >= base_ + static_cast<std::int64_t>(counts_.size())) {
      grow(level);
    }
    counts_[static_cast<std::size_t>(level - base_)] += count;
    total_ += count;
    lo_ = std::min(lo_, level);
    hi_ = std::max(hi_, level);
  }

  std::uint64_t count(std::int64_t level) const {
    if (counts_.empty() || level < base_ || level >= base_ + static_cast<std::int64_t>(counts_.size())) return 0;
    return counts_[static_cast<std::size_t>(level - base_)];
  }

  /// n, the number of counted steps (sum over all levels).
  std::uint64_t horizon() const { return total_; }
  bool empty() const { return total_ == 0; }
  /// Range of visited levels; meaningless when empty().
  std::int64_t min_level() const { return lo_; }
  std::int64_t max_level() const { return hi_; }

  std::map<std::int64_t, std::uint64_t> to_map() const;

  /// Most visited level, ties broken toward the smallest level; (0, 0) when empty.
  std::pair<std::int64_t, std::uint64_t> argmax() const;

  /// sup over all integers x of |xi(x+1) - xi(x)|.
  std::uint64_t max_adjacent_increment() const;

  /// Total time at levels >= 0 and at levels < 0.
  std::pair<std::uint64_t, std::uint64_t> split_at_zero() const;

 private:
  void grow(std::int64_t level);

  std::int64_t base_ = 0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
};

struct WalkPath {
  std::vector<Point> positions;  // positions[0] = (0, 0)
  std::vector<StepKind> kinds;   // kinds[n] describes the move positions[n] -> positions[n + 1]
  Environment env = Environment::unvalidated(EnvironmentSpec::hphc());
  std::uint64_t seed = 0;

  std::uint64_t steps() const { return kinds.size(); }
  Point end() const { return positions.back(); }
};

struct LevelBlocks {
  std::uint64_t draws = 0;
  std::uint64_t sum = 0;
};

/// Horizontal/vertical bookkeeping of the geometric-block construction.
struct GeometricDecomposition {
  std::uint64_t H = 0;       // horizontal steps among the first N
  std::uint64_t V = 0;       // vertical steps among the first N
  std::uint64_t H_star = 0;  // blocks summed without truncating the last one
  std::map<std::int64_t, LevelBlocks> blocks;
};

struct ConstructiveWalk {
  WalkPath path;
  GeometricDecomposition decomposition;
};

/// Running statistics of one walk; no position history.
struct WalkSummary {
  Point end;
  std::uint64_t H = 0;
  std::uint64_t V = 0;
  std::uint64_t H_star = 0;            // equals H for the direct method
  std::uint64_t vertical_nonneg = 0;   // #{k in 1..V : S2(k) >= 0}
  std::uint64_t vertical_neg = 0;      // #{k in 1..V : S2(k) < 0}
  std::optional<LocalTimeProfile> vertical;  // xi2(., V), when requested
};

/// Per-level constants needed by the step loops, cached over the visited window.
class LevelCache {
 public:
  struct Level {
    double p = 0.25;
    double two_p = 0.5;
    double half_plus_p = 0.75;
    double inv_log_fail = 0.0;  // 1 / log(1 - 2p); unused when p = 1/2
    bool never_horizontal = false;
  };

  explicit LevelCache(const Environment& env) : env_(env) {}

  const Level& at(std::int64_t j) {
    if (j < base_ || j >= base_ + static_cast<std::int64_t>(levels_.size())) extend(j);
    return levels_[static_cast<std::size_t>(j - base_)];
  }

 private:
  void extend(std::int64_t j);
  Level make(std::int64_t j) const;

  const Environment& env_;
  std::int64_t base_ = 0;
  std::vector<Level> levels_;
};

/// One draw from P(G = k) = 2p (1 - 2p)^k by inverse CDF.
inline std::uint64_t draw_geometric(Rng& rng, const LevelCache::Level& level) {
  if (level.never_horizontal) return 0;
  const double g = std::floor(std::log(rng.uniform_open()) * level.inv_log_fail);
  constexpr double cap = 0x1.0p62;
  return g >= cap ? static_cast<std::uint64_t>(cap) : static_cast<std::uint64_t>(g);
}

/// Markov-chain driver. Calls sink.step(kind, dx, dy) once per step.
template <class Sink>
void drive_direct(const Environment& env, std::uint64_t steps, Rng& rng, Sink& sink) {
  LevelCache cache(env);
  std::int64_t level = 0;
  for (std::uint64_t n = 0; n < steps; ++n) {
    const auto& lv = cache.at(level);
    const double u = rng.uniform_open();
    if (u < lv.p) {
      ++level;
      sink.step(StepKind::vertical, 0, +1);
    } else if (u < lv.two_p) {
      --level;
      sink.step(StepKind::vertical, 0, -1);
    } else if (u < lv.half_plus_p) {
      sink.step(StepKind::horizontal, +1, 0);
    } else {
      sink.step(StepKind::horizontal, -1, 0);
    }
  }
}

/// Geometric-block driver: on each arrival at a level draw a block length G,
/// take G horizontal steps from S1 (truncated at the step budget), then one
/// vertical step from S2. Sink callbacks:
///   block(level, g)           untruncated block drawn at `level`
///   horizontal(word, count)   `count` S1 steps, bit i set means +1
///   vertical(sign, level)     one S2 step arriving at `level`
template <class Sink>
void drive_constructive(const Environment& env, std::uint64_t steps, Rng& rng, Sink& sink) {
  LevelCache cache(env);
  std::int64_t level = 0;
  std::uint64_t remaining = steps;
  while (remaining > 0) {
    const std::uint64_t g = draw_geometric(rng, cache.at(level));
    sink.block(level, g);
    std::uint64_t h = std::min(g, remaining);
    remaining -= h;
    while (h > 0) {
      const auto c = static_cast<unsigned>(std::min<std::uint64_t>(h, 64));
      sink.horizontal(rng.next(), c);
      h -= c;
    }
    if (remaining == 0) break;
    const int s = rng.sign();
    level += s;
    sink.vertical(s, level);
    --remaining;
  }
}

/// Simple symmetric walk; calls on_step(n, S(n)) for n = 1..steps.
template <class Fn>
void drive_simple(std::uint64_t steps, Rng& rng, Fn&& on_step) {
  std::int64_t s = 0;
  std::uint64_t n = 0;
  while (n < steps) {
    const std::uint64_t word = rng.next();
    const auto c = static_cast<unsigned>(std::min<std::uint64_t>(steps - n, 64));
    for (unsigned i = 0; i < c; ++i) {
      s += ((word >> i) & 1U) ? 1 : -1;
      on_step(++n, s);
    }
  }
}

WalkPath simulate_direct(const Environment& env, std::uint64_t steps, std::uint64_t seed);
ConstructiveWalk simulate_constructive(const Environment& env, std::uint64_t steps, std::uint64_t seed);

WalkSummary simulate_summary(const Environment& env, std::uint64_t steps, std::uint64_t seed, WalkMethod method,
                             bool keep_vertical_profile = false);

/// Local-time profile of a simple symmetric walk of `steps` steps.
LocalTimeProfile simple_walk_local_time(std::uint64_t steps, std::uint64_t seed);

/// #{k in 1..horizon : values[k] = level}. Pre: horizon < values.size().
std::uint64_t local_time(std::span<const std::int64_t> values, std::int64_t level, std::uint64_t horizon);

std::pair<std::int64_t, std::uint64_t> max_local_time(std::span<const std::int64_t> values, std::uint64_t horizon);

LocalTimeProfile local_time_profile(std::span<const std::int64_t> values, std::uint64_t horizon);

/// gamma1 * (time at levels >= 0) + gamma2 * (time at levels < 0).
double discrete_time_change(const LocalTimeProfile& profile, double gamma1, double gamma2);

/// CSV with header n,c1,c2,kind; row 0 has kind "start".
void write_path_csv(const WalkPath& path, std::ostream& out);

nlohmann::json decomposition_json(const GeometricDecomposition& d);

std::string_view to_string(WalkMethod method);
WalkMethod walk_method_from_string(std::string_view name);

}  // namespace aniso
