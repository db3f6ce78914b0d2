#include "aniso/walk.hpp"

#include <ostream>

#include "aniso/errors.hpp"

namespace aniso {

LocalTimeProfile LocalTimeProfile::from_counts(const std::map<std::int64_t, std::uint64_t>& counts) {
  LocalTimeProfile out;
  for (const auto& [level, c] : counts) out.add(level, c);
  return out;
}

void LocalTimeProfile::grow(std::int64_t level) {
  const auto size = static_cast<std::int64_t>(counts_.size());
  std::int64_t new_base = base_;
  std::int64_t new_size = size;
  while (level < new_base) {
    new_base -= new_size;
    new_size *= 2;
  }
  while (level >= new_base + new_size) new_size *= 2;
  std::vector<std::uint64_t> grown(static_cast<std::size_t>(new_size), 0);
  std::copy(counts_.begin(), counts_.end(), grown.begin() + (base_ - new_base));
  counts_ = std::move(grown);
  base_ = new_base;
}

std::map<std::int64_t, std::uint64_t> LocalTimeProfile::to_map() const {
  std::map<std::int64_t, std::uint64_t> out;
  if (empty()) return out;
  for (std::int64_t j = lo_; j <= hi_; ++j) {
    if (const auto c = count(j); c > 0) out[j] = c;
  }
  return out;
}

std::pair<std::int64_t, std::uint64_t> LocalTimeProfile::argmax() const {
  if (empty()) return {0, 0};
  std::pair<std::int64_t, std::uint64_t> best{lo_, count(lo_)};
  for (std::int64_t j = lo_ + 1; j <= hi_; ++j) {
    if (const auto c = count(j); c > best.second) best = {j, c};
  }
  return best;
}

std::uint64_t LocalTimeProfile::max_adjacent_increment() const {
  if (empty()) return 0;
  std::uint64_t best = 0;
  for (std::int64_t x = lo_ - 1; x <= hi_; ++x) {
    const auto a = count(x);
    const auto b = count(x + 1);
    best = std::max(best, a > b ? a - b : b - a);
  }
  return best;
}

std::pair<std::uint64_t, std::uint64_t> LocalTimeProfile::split_at_zero() const {
  std::uint64_t nonneg = 0;
  std::uint64_t neg = 0;
  if (empty()) return {0, 0};
  for (std::int64_t j = lo_; j <= hi_; ++j) (j >= 0 ? nonneg : neg) += count(j);
  return {nonneg, neg};
}

LevelCache::Level LevelCache::make(std::int64_t j) const {
  Level lv;
  lv.p = env_.p(j);
  lv.two_p = 2.0 * lv.p;
  lv.half_plus_p = 0.5 + lv.p;
  lv.never_horizontal = lv.p >= 0.5;
  lv.inv_log_fail = lv.never_horizontal ? 0.0 : 1.0 / std::log1p(-2.0 * lv.p);
  return lv;
}

void LevelCache::extend(std::int64_t j) {
  if (levels_.empty()) {
    base_ = j - 32;
    for (std::int64_t k = base_; k <= j + 32; ++k) levels_.push_back(make(k));
    return;
  }
  const auto size = static_cast<std::int64_t>(levels_.size());
  if (j < base_) {
    const std::int64_t new_base = std::min(j, base_ - size);
    std::vector<Level> front;
    front.reserve(static_cast<std::size_t>(base_ - new_base) + levels_.size());
    for (std::int64_t k = new_base; k < base_; ++k) front.push_back(make(k));
    front.insert(front.end(), levels_.begin(), levels_.end());
    levels_ = std::move(front);
    base_ = new_base;
  } else {
    const std::int64_t new_end = std::max(j + 1, base_ + 2 * size);
    for (std::int64_t k = base_ + size; k < new_end; ++k) levels_.push_back(make(k));
  }
}

namespace {

void check_storable(std::uint64_t steps) {
  if (steps > kMaxStoredSteps) {
    throw InvalidArgument("path of " + std::to_string(steps) + " steps exceeds the stored-path limit " +
                          std::to_string(kMaxStoredSteps) + "; use summary statistics");
  }
}

struct PathSink {
  WalkPath& path;
  GeometricDecomposition& dec;
  Point pos{};

  void push(StepKind kind) {
    path.positions.push_back(pos);
    path.kinds.push_back(kind);
  }

  void step(StepKind kind, int dx, int dy) {
    pos.x += dx;
    pos.y += dy;
    (kind == StepKind::horizontal ? dec.H : dec.V) += 1;
    push(kind);
  }

  void block(std::int64_t level, std::uint64_t g) {
    auto& b = dec.blocks[level];
    ++b.draws;
    b.sum += g;
    dec.H_star += g;
  }

  void horizontal(std::uint64_t word, unsigned count) {
    for (unsigned i = 0; i < count; ++i) {
      pos.x += ((word >> i) & 1U) ? 1 : -1;
      push(StepKind::horizontal);
    }
    dec.H += count;
  }

  void vertical(int sign, std::int64_t) {
    pos.y += sign;
    ++dec.V;
    push(StepKind::vertical);
  }
};

struct SummarySink {
  WalkSummary& s;

  void arrive(std::int64_t level) {
    (level >= 0 ? s.vertical_nonneg : s.vertical_neg) += 1;
    if (s.vertical) s.vertical->add(level);
  }

  void step(StepKind kind, int dx, int dy) {
    s.end.x += dx;
    s.end.y += dy;
    if (kind == StepKind::horizontal) {
      ++s.H;
    } else {
      ++s.V;
      arrive(s.end.y);
    }
  }

  void block(std::int64_t, std::uint64_t g) { s.H_star += g; }

  void horizontal(std::uint64_t word, unsigned count) {
    s.end.x += bit_walk_displacement(word, count);
    s.H += count;
  }

  void vertical(int sign, std::int64_t level) {
    s.end.y += sign;
    ++s.V;
    arrive(level);
  }
};

}  // namespace

WalkPath simulate_direct(const Environment& env, std::uint64_t steps, std::uint64_t seed) {
  check_storable(steps);
  WalkPath path;
  path.env = env;
  path.seed = seed;
  path.positions.reserve(steps + 1);
  path.kinds.reserve(steps);
  path.positions.push_back({0, 0});
  GeometricDecomposition dec;
  PathSink sink{path, dec};
  Rng rng(seed);
  drive_direct(env, steps, rng, sink);
  return path;
}

ConstructiveWalk simulate_constructive(const Environment& env, std::uint64_t steps, std::uint64_t seed) {
  check_storable(steps);
  ConstructiveWalk out;
  out.path.env = env;
  out.path.seed = seed;
  out.path.positions.reserve(steps + 1);
  out.path.kinds.reserve(steps);
  out.path.positions.push_back({0, 0});
  PathSink sink{out.path, out.decomposition};
  Rng rng(seed);
  drive_constructive(env, steps, rng, sink);
  return out;
}

WalkSummary simulate_summary(const Environment& env, std::uint64_t steps, std::uint64_t seed, WalkMethod method,
                             bool keep_vertical_profile) {
  WalkSummary s;
  if (keep_vertical_profile) s.vertical.emplace();
  SummarySink sink{s};
  Rng rng(seed);
  if (method == WalkMethod::direct) {
    drive_direct(env, steps, rng, sink);
    s.H_star = s.H;
  } else {
    drive_constructive(env, steps, rng, sink);
  }
  return s;
}

LocalTimeProfile simple_walk_local_time(std::uint64_t steps, std::uint64_t seed) {
  LocalTimeProfile profile;
  Rng rng(seed);
  drive_simple(steps, rng, [&](std::uint64_t, std::int64_t s) { profile.add(s); });
  return profile;
}

namespace {

void check_horizon(std::span<const std::int64_t> values, std::uint64_t horizon) {
  if (values.empty() || horizon >= values.size()) {
    throw InvalidArgument("horizon " + std::to_string(horizon) + " exceeds walk length " +
                          std::to_string(values.empty() ? 0 : values.size() - 1));
  }
}

}  // namespace

std::uint64_t local_time(std::span<const std::int64_t> values, std::int64_t level, std::uint64_t horizon) {
  if (horizon == 0) return 0;
  check_horizon(values, horizon);
  return static_cast<std::uint64_t>(std::count(values.begin() + 1, values.begin() + 1 + static_cast<std::ptrdiff_t>(horizon), level));
}

LocalTimeProfile local_time_profile(std::span<const std::int64_t> values, std::uint64_t horizon) {
  LocalTimeProfile profile;
  if (horizon == 0) return profile;
  check_horizon(values, horizon);
  for (std::uint64_t k = 1; k <= horizon; ++k) profile.add(values[k]);
  return profile;
}

std::pair<std::int64_t, std::uint64_t> max_local_time(std::span<const std::int64_t> values, std::uint64_t horizon) {
  return local_time_profile(values, horizon).argmax();
}

double discrete_time_change(const LocalTimeProfile& profile, double gamma1, double gamma2) {
  const auto [nonneg, neg] = profile.split_at_zero();
  return gamma1 * static_cast<double>(nonneg) + gamma2 * static_cast<double>(neg);
}

void write_path_csv(const WalkPath& path, std::ostream& out) {
  out << "n,c1,c2,kind\n";
  for (std::size_t n = 0; n < path.positions.size(); ++n) {
    const auto& p = path.positions[n];
    const char* kind = n == 0 ? "start" : (path.kinds[n - 1] == StepKind::horizontal ? "horizontal" : "vertical");
    out << n << ',' << p.x << ',' << p.y << ',' << kind << '\n';
  }
}

nlohmann::json decomposition_json(const GeometricDecomposition& d) {
  return {{"N", d.H + d.V}, {"H", d.H}, {"V", d.V}, {"H_star", d.H_star}};
}

std::string_view to_string(WalkMethod method) {
  return method == WalkMethod::direct ? "direct" : "constructive";
}

WalkMethod walk_method_from_string(std::string_view name) {
  if (name == "direct") return WalkMethod::direct;
  if (name == "constructive") return WalkMethod::constructive;
  throw InvalidArgument("unknown walk method '" + std::string(name) + "'");
}

}  // namespace aniso
