#include "aniso/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "aniso/density.hpp"
#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"
#include "aniso/rng.hpp"
#include "aniso/timechange.hpp"

namespace aniso::verify {

namespace {

bool is_power_of_two(std::uint64_t n) { return n != 0 && std::has_single_bit(n); }

void require_valid(const Environment& env) {
  const auto verdict = validate_environment(env, 1024);
  if (!verdict.valid) throw InvalidEnvironment("degenerate environment: " + verdict.reason, verdict.offending_level);
}

struct EndpointSink {
  Point pos;
  void block(std::int64_t, std::uint64_t) {}
  void horizontal(std::uint64_t word, unsigned count) { pos.x += bit_walk_displacement(word, count); }
  void vertical(int sign, std::int64_t) { pos.y += sign; }
};

template <class Fn>
struct StepObserver {
  Point pos;
  std::uint64_t n = 0;
  Fn& fn;
  void step(StepKind, int dx, int dy) {
    pos.x += dx;
    pos.y += dy;
    fn(++n, pos);
  }
};

}  // namespace

bool LilDiagnostic::pass() const {
  for (const auto& track : tracks) {
    if (!track.gated) continue;
    const double r = track.final_normalized();
    if (!(r >= band_lo && r <= band_hi)) return false;
  }
  return true;
}

std::string_view to_string(LilKind kind) {
  switch (kind) {
    case LilKind::walk_max: return "walk_max";
    case LilKind::local_time_max: return "local_time_max";
    case LilKind::c1: return "c1";
    case LilKind::c2: return "c2";
  }
  return "unknown";
}

LilKind lil_kind_from_string(std::string_view name) {
  if (name == "walk_max") return LilKind::walk_max;
  if (name == "local_time_max") return LilKind::local_time_max;
  if (name == "c1" || name == "C1") return LilKind::c1;
  if (name == "c2" || name == "C2") return LilKind::c2;
  throw InvalidArgument("unknown LIL kind '" + std::string(name) + "'");
}

std::vector<double> walk_endpoint_samples(const Environment& env, std::uint64_t steps, std::size_t replicas,
                                          std::uint64_t seed, unsigned workers) {
  if (steps == 0) throw InvalidArgument("walk_endpoint_samples: need N > 0");
  std::vector<double> out(replicas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(steps));
  parallel_for(replicas, workers, [&](std::size_t r) {
    const auto s = simulate_summary(env, steps, derive_seed(seed, "endpoint/walk", r), WalkMethod::direct);
    out[r] = static_cast<double>(s.end.y) * scale;
  });
  return out;
}

namespace {

/// Horizon long enough that A(T) >= t on every path (A(T) >= gamma2 T).
double horizon_for(double t, double gamma2, double dt) { return t / gamma2 + dt; }

}  // namespace

std::vector<double> oscillating_samples(double gamma1, double gamma2, double t, double dt, std::size_t replicas,
                                        std::uint64_t seed, unsigned workers) {
  std::vector<double> out(replicas);
  const double horizon = horizon_for(t, gamma2, dt);
  const double times[] = {t};
  parallel_for(replicas, workers, [&](std::size_t r) {
    const auto w = simulate_wiener(horizon, dt, derive_seed(seed, "endpoint/obm", r));
    out[r] = oscillating_bm(w, gamma1, gamma2, times)[0];
  });
  return out;
}

std::vector<double> inverse_time_samples(double gamma1, double gamma2, double t, double dt, std::size_t replicas,
                                         std::uint64_t seed, unsigned workers) {
  std::vector<double> out(replicas);
  const double horizon = horizon_for(t, gamma2, dt);
  parallel_for(replicas, workers, [&](std::size_t r) {
    const auto w = simulate_wiener(horizon, dt, derive_seed(seed, "inverse_law", r));
    out[r] = inverse_time_change(additive_functional(w, gamma1, gamma2), t);
  });
  return out;
}

std::map<Point, double> exact_endpoint_law(const Environment& env, std::uint64_t steps) {
  std::map<Point, double> law{{Point{0, 0}, 1.0}};
  for (std::uint64_t n = 0; n < steps; ++n) {
    std::map<Point, double> next;
    for (const auto& [pt, mass] : law) {
      const double p = env.p(pt.y);
      const double h = 0.5 - p;
      next[{pt.x, pt.y + 1}] += mass * p;
      next[{pt.x, pt.y - 1}] += mass * p;
      if (h > 0.0) {
        next[{pt.x + 1, pt.y}] += mass * h;
        next[{pt.x - 1, pt.y}] += mass * h;
      }
    }
    law = std::move(next);
  }
  return law;
}

AbelResult abel_identity_check(const LocalTimeProfile& profile, std::span<const double> betas, double rho) {
  if (profile.empty() || profile.max_level() < 1) return {0.0, 0.0, 0.0};
  const std::int64_t top = profile.max_level();
  if (static_cast<std::int64_t>(betas.size()) < top + 1) {
    throw InvalidArgument("abel_identity_check: betas must cover levels 1.." + std::to_string(top + 1));
  }
  for (std::int64_t j = 1; j <= top + 1; ++j) {
    if (!(betas[static_cast<std::size_t>(j - 1)] > 0.0)) {
      throw InvalidArgument("abel_identity_check: beta_" + std::to_string(j) + " must be positive");
    }
  }
  const auto xi = [&](std::int64_t j) { return static_cast<long double>(profile.count(j)); };
  long double lhs = 0.0L;
  long double mass = 0.0L;
  long double correction = 0.0L;
  long double prefix = 0.0L;  // sum_{k <= j} 1 / beta_k
  for (std::int64_t j = 1; j <= top; ++j) {
    const long double inv = 1.0L / betas[static_cast<std::size_t>(j - 1)];
    lhs += xi(j) * inv;
    mass += xi(j);
    prefix += inv;
    const long double kappa = prefix / static_cast<long double>(j);
    correction += static_cast<long double>(j) * (kappa - rho) * (xi(j) - xi(j + 1));
  }
  const long double rhs = static_cast<long double>(rho) * mass + correction;
  return {static_cast<double>(lhs), static_cast<double>(rhs), static_cast<double>(std::fabs(lhs - rhs))};
}

ScanResult coupling_error_scan(const Environment& env, std::span<const std::uint64_t> n_grid, std::size_t replicas,
                               std::uint64_t seed, unsigned workers, std::optional<double> tau, double epsilon) {
  require_valid(env);
  if (replicas < 50) throw InvalidArgument("coupling_error_scan: need at least 50 replicas");
  for (auto n : n_grid) {
    if (!is_power_of_two(n)) throw InvalidArgument("coupling_error_scan: N grid must be dyadic");
  }
  const auto oriented = orient(env);
  const double g1 = oriented.profile.gamma1;
  const double g2 = oriented.profile.gamma2;
  std::vector<double> errors(n_grid.size() * replicas);
  parallel_for(errors.size(), workers, [&](std::size_t cell) {
    const std::uint64_t n = n_grid[cell / replicas];
    const auto s = simulate_summary(oriented.env, n, derive_seed(seed, "coupling", cell), WalkMethod::constructive);
    const double a_hat = g1 * static_cast<double>(s.vertical_nonneg) + g2 * static_cast<double>(s.vertical_neg);
    errors[cell] = std::abs(static_cast<double>(n) - a_hat);
  });
  ScanResult out;
  out.n_grid.assign(n_grid.begin(), n_grid.end());
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const auto first = errors.begin() + static_cast<std::ptrdiff_t>(i * replicas);
    out.medians.push_back(median(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(replicas))));
    points.emplace_back(static_cast<double>(n_grid[i]), out.medians.back());
  }
  out.fit = exponent_regression(points);
  const double t = tau ? *tau : oriented.profile.effective_tau();
  out.target_slope = 1.25 - t / 2.0 + epsilon;
  out.pass = out.fit.slope <= out.target_slope;
  return out;
}

GofReport endpoint_distribution_test(const Environment& env, std::uint64_t steps, std::size_t replicas,
                                     double gamma1, double gamma2, std::size_t bm_replicas, double dt,
                                     std::uint64_t seed, unsigned workers, double threshold) {
  require_valid(env);
  if (steps < 1000) throw InvalidArgument("endpoint_distribution_test: need N >= 1000");
  if (replicas < 10000 || bm_replicas < 10000) {
    throw InvalidArgument("endpoint_distribution_test: need at least 10^4 replicas on each side");
  }
  const auto walk = walk_endpoint_samples(env, steps, replicas, seed, workers);
  const auto obm = oscillating_samples(gamma1, gamma2, 1.0, dt, bm_replicas, seed, workers);
  GofReport r;
  r.ks_distance = ks_two_sample(walk, obm);
  r.n_samples = replicas + bm_replicas;
  r.reference = "Y(1) = W(A^-1(1)), gamma1 = " + std::to_string(gamma1) + ", gamma2 = " + std::to_string(gamma2) +
                ", dt = " + std::to_string(dt);
  r.threshold = threshold;
  r.pass = r.ks_distance <= threshold;
  return r;
}

GofReport endpoint_normal_test(const Environment& env, std::uint64_t steps, std::size_t replicas,
                               std::uint64_t seed, unsigned workers, double threshold) {
  require_valid(env);
  const auto oriented = orient(env);
  const double g1 = oriented.profile.gamma1;
  const double g2 = oriented.profile.gamma2;
  if (std::abs(g1 - g2) > 1e-9 * g1) {
    throw InvalidArgument("endpoint_normal_test: needs gamma1 = gamma2 (normal limit)");
  }
  const auto walk = walk_endpoint_samples(env, steps, replicas, seed, workers);
  const double variance = 1.0 / g1;
  GofReport r;
  r.ks_distance = ks_one_sample(walk, [&](double x) { return normal_cdf(x, variance); });
  r.n_samples = replicas;
  r.reference = "normal(0, " + std::to_string(variance) + ")";
  r.threshold = threshold;
  r.pass = r.ks_distance <= threshold;
  return r;
}

GofReport horizontal_fraction_test(const Environment& env, std::uint64_t steps, std::size_t replicas,
                                   std::uint64_t seed, unsigned workers, double threshold, double concentration_tol) {
  require_valid(env);
  if (steps < 10000) throw InvalidArgument("horizontal_fraction_test: need N >= 10^4");
  const auto oriented = orient(env);
  const double g1 = oriented.profile.gamma1;
  const double g2 = oriented.profile.gamma2;
  std::vector<double> fractions(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) {
    const auto s = simulate_summary(oriented.env, steps, derive_seed(seed, "horizontal_fraction", r),
                                    WalkMethod::constructive);
    fractions[r] = static_cast<double>(s.H) / static_cast<double>(steps);
  });
  GofReport out;
  out.n_samples = replicas;
  if (std::abs(g1 - g2) <= 1e-9 * g1) {
    const double limit = 1.0 - 1.0 / g1;
    double worst = 0.0;
    for (double f : fractions) worst = std::max(worst, std::abs(f - limit));
    out.ks_distance = worst;
    out.reference = "concentration at 1 - 1/gamma = " + std::to_string(limit);
    out.threshold = concentration_tol;
  } else {
    const auto spec = make_density_spec(1.0, g1, g2, DensityVariant::complement);
    std::sort(fractions.begin(), fractions.end());
    out.ks_distance = ks_one_sample_sorted(fractions, density_cdf_sorted(spec, fractions));
    out.reference = "1 - A^-1(1), gamma1 = " + std::to_string(g1) + ", gamma2 = " + std::to_string(g2);
    out.threshold = threshold;
  }
  out.pass = out.ks_distance <= out.threshold;
  return out;
}

ScanResult local_time_increment_scan(std::span<const std::uint64_t> n_grid, std::size_t replicas,
                                     std::uint64_t seed, unsigned workers, double epsilon) {
  if (replicas == 0) throw InvalidArgument("local_time_increment_scan: need replicas > 0");
  std::vector<double> sup_increment(n_grid.size() * replicas);
  parallel_for(sup_increment.size(), workers, [&](std::size_t cell) {
    const std::uint64_t n = n_grid[cell / replicas];
    const auto profile = simple_walk_local_time(n, derive_seed(seed, "increments", cell));
    sup_increment[cell] = static_cast<double>(profile.max_adjacent_increment());
  });
  ScanResult out;
  out.n_grid.assign(n_grid.begin(), n_grid.end());
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const auto first = sup_increment.begin() + static_cast<std::ptrdiff_t>(i * replicas);
    out.medians.push_back(median(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(replicas))));
    points.emplace_back(static_cast<double>(n_grid[i]), out.medians.back());
  }
  out.fit = exponent_regression(points);
  out.target_slope = 0.25 + epsilon;
  out.pass = out.fit.slope <= out.target_slope;
  return out;
}

LilDiagnostic lil_diagnostics(LilKind kind, const Environment& env, std::uint64_t n_max, std::uint64_t seed,
                              std::uint64_t n_start) {
  if (n_max < (std::uint64_t{1} << 16) || !is_power_of_two(n_max)) {
    throw InvalidArgument("lil_diagnostics: N_max must be dyadic and >= 2^16");
  }
  if (n_start < 16 || !is_power_of_two(n_start) || n_start > n_max) {
    throw InvalidArgument("lil_diagnostics: n_start must be dyadic in [16, N_max]");
  }
  LilDiagnostic diag;
  diag.kind = kind;
  for (std::uint64_t n = n_start; n <= n_max; n *= 2) diag.checkpoints.push_back(n);

  auto add_track = [&](std::string name, double target, bool upper, bool gated) {
    LilTrack t;
    t.name = std::move(name);
    t.target = target;
    t.upper = upper;
    t.gated = gated;
    diag.tracks.push_back(std::move(t));
  };

  std::vector<double> extreme;
  std::vector<double> current;
  std::size_t next_checkpoint = 0;
  // Fold the per-step normalized values into running extremes and record at checkpoints.
  auto observe = [&](std::uint64_t n) {
    if (n < n_start) return;
    for (std::size_t i = 0; i < current.size(); ++i) {
      const bool first = n == n_start;
      if (first) {
        extreme[i] = current[i];
      } else if (diag.tracks[i].upper) {
        extreme[i] = std::max(extreme[i], current[i]);
      } else {
        extreme[i] = std::min(extreme[i], current[i]);
      }
    }
    if (next_checkpoint < diag.checkpoints.size() && n == diag.checkpoints[next_checkpoint]) {
      for (std::size_t i = 0; i < current.size(); ++i) {
        diag.tracks[i].at_checkpoint.push_back(current[i]);
        diag.tracks[i].running.push_back(extreme[i]);
      }
      ++next_checkpoint;
    }
  };
  auto loglog = [](std::uint64_t n) { return std::log(std::log(static_cast<double>(n))); };

  Rng rng(seed);
  if (kind == LilKind::walk_max || kind == LilKind::local_time_max) {
    if (kind == LilKind::walk_max) {
      add_track("limsup M_n / sqrt(2 n loglog n)", 1.0, true, true);
      add_track("liminf M_n sqrt(loglog n / n)", std::numbers::pi / std::sqrt(8.0), false, false);
    } else {
      add_track("limsup xi(n) / sqrt(2 n loglog n)", 1.0, true, true);
    }
    extreme.assign(diag.tracks.size(), 0.0);
    current.assign(diag.tracks.size(), 0.0);
    std::uint64_t max_abs = 0;
    std::uint64_t max_visits = 0;
    LocalTimeProfile profile;
    drive_simple(n_max, rng, [&](std::uint64_t n, std::int64_t s) {
      max_abs = std::max<std::uint64_t>(max_abs, static_cast<std::uint64_t>(s < 0 ? -s : s));
      if (kind == LilKind::local_time_max) {
        profile.add(s);
        max_visits = std::max(max_visits, profile.count(s));
      }
      if (n < n_start) return;
      const double ll = loglog(n);
      const double nn = static_cast<double>(n);
      if (kind == LilKind::walk_max) {
        current[0] = static_cast<double>(max_abs) / std::sqrt(2.0 * nn * ll);
        current[1] = static_cast<double>(max_abs) * std::sqrt(ll / nn);
      } else {
        current[0] = static_cast<double>(max_visits) / std::sqrt(2.0 * nn * ll);
      }
      observe(n);
    });
  } else {
    require_valid(env);
    const auto oriented = orient(env);
    const double g1 = oriented.profile.gamma1;
    const double g2 = oriented.profile.gamma2;
    if (kind == LilKind::c1) {
      const double c = std::sqrt(2.0 * (1.0 - 1.0 / g1));
      if (c == 0.0) throw InvalidArgument("lil_diagnostics: C1 constant vanishes for gamma1 = 1");
      add_track("limsup C1(N) / sqrt(N loglog N)", c, true, true);
      add_track("liminf C1(N) / sqrt(N loglog N)", -c, false, true);
    } else {
      add_track("limsup C2(N) / sqrt(N loglog N)", std::sqrt(2.0 / g1), true, true);
      add_track("liminf C2(N) / sqrt(N loglog N)", -std::sqrt(2.0 / g2), false, true);
    }
    extreme.assign(diag.tracks.size(), 0.0);
    current.assign(diag.tracks.size(), 0.0);
    auto on_step = [&](std::uint64_t n, const Point& pos) {
      if (n < n_start) return;
      const double scale = std::sqrt(static_cast<double>(n) * loglog(n));
      const double v = static_cast<double>(kind == LilKind::c1 ? pos.x : pos.y) / scale;
      current[0] = v;
      current[1] = v;
      observe(n);
    };
    StepObserver<decltype(on_step)> sink{{}, 0, on_step};
    drive_direct(oriented.env, n_max, rng, sink);
  }
  return diag;
}

EquivalenceResult construction_equivalence_test(const Environment& env, std::uint64_t steps,
                                                std::uint64_t mc_samples, std::uint64_t seed, unsigned workers) {
  require_valid(env);
  if (steps > 8) throw InvalidArgument("construction_equivalence_test: N_small must be <= 8");
  if (mc_samples < 1000000) throw InvalidArgument("construction_equivalence_test: need >= 10^6 samples");
  const auto exact = exact_endpoint_law(env, steps);

  constexpr std::size_t chunks = 100;
  std::vector<std::map<Point, std::uint64_t>> partial(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::uint64_t count = mc_samples / chunks + (c < mc_samples % chunks ? 1 : 0);
    Rng rng(derive_seed(seed, "equivalence", c));
    auto& tally = partial[c];
    for (std::uint64_t i = 0; i < count; ++i) {
      EndpointSink sink;
      drive_constructive(env, steps, rng, sink);
      ++tally[sink.pos];
    }
  });
  std::map<Point, std::uint64_t> counts;
  for (const auto& tally : partial) {
    for (const auto& [pt, c] : tally) counts[pt] += c;
  }
  std::map<Point, double> empirical;
  for (const auto& [pt, c] : counts) empirical[pt] = static_cast<double>(c) / static_cast<double>(mc_samples);

  EquivalenceResult out;
  out.tv_distance = total_variation(exact, empirical);
  out.support_size = exact.size();
  out.samples = mc_samples;
  return out;
}

ExponentFit exponent_regression(std::span<const std::pair<double, double>> points) {
  return fit_loglog(points, 3);
}

BoundsResult time_change_bounds_check(std::size_t paths, double horizon, double dt, double gamma1, double gamma2,
                                      std::uint64_t seed, unsigned workers) {
  std::vector<BoundsResult> per_path(paths);
  parallel_for(paths, workers, [&](std::size_t i) {
    const auto w = simulate_wiener(horizon, dt, derive_seed(seed, "timechange_bounds", i));
    const auto tc = additive_functional(w, gamma1, gamma2);
    auto& r = per_path[i];
    r.paths = 1;
    for (std::size_t k = 0; k <= tc.cells(); ++k) {
      ++r.grid_points;
      const double t = tc.time(k);
      if (tc.values[k] < gamma2 * t) ++r.lower_violations;
      if (tc.values[k] > gamma1 * t) ++r.upper_violations;
      if (k > 0) {
        if (tc.values[k] < tc.values[k - 1]) ++r.monotone_violations;
        if (tc.excess(k) < tc.excess(k - 1)) ++r.excess_violations;
      }
    }
    if (tc.values[0] != 0.0) ++r.lower_violations;
  });
  BoundsResult total;
  for (const auto& r : per_path) {
    total.paths += r.paths;
    total.grid_points += r.grid_points;
    total.monotone_violations += r.monotone_violations;
    total.excess_violations += r.excess_violations;
    total.lower_violations += r.lower_violations;
    total.upper_violations += r.upper_violations;
  }
  return total;
}

InverseLawResult inverse_law_test(std::size_t paths, double t, double dt, double gamma1, double gamma2,
                                  std::uint64_t seed, unsigned workers, double threshold) {
  const auto spec = make_density_spec(t, gamma1, gamma2, DensityVariant::inverse);
  auto samples = inverse_time_samples(gamma1, gamma2, t, dt, paths, seed, workers);
  std::sort(samples.begin(), samples.end());
  InverseLawResult out;
  out.gof.ks_distance = ks_one_sample_sorted(samples, density_cdf_sorted(spec, samples));
  out.gof.n_samples = paths;
  out.gof.reference = "closed-form law of A^-1(t)";
  out.gof.threshold = threshold;
  out.gof.pass = out.gof.ks_distance <= threshold;
  out.total_mass = density_total_mass(spec);
  out.pass = out.gof.pass && std::abs(out.total_mass - 1.0) <= out.mass_tolerance;
  return out;
}

}  // namespace aniso::verify
