#include "aniso/aniso.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "aniso/density.hpp"
#include "aniso/env.hpp"
#include "aniso/errors.hpp"
#include "aniso/parallel.hpp"
#include "aniso/rng.hpp"
#include "aniso/timechange.hpp"
#include "aniso/verify.hpp"
#include "aniso/walk.hpp"

struct aniso_env {
  aniso::Environment env;
};

struct aniso_path {
  aniso::WalkPath path;
  aniso::GeometricDecomposition decomposition;
};

struct aniso_timechange {
  aniso::WienerGrid wiener;
  aniso::TimeChange tc;
};

namespace {

thread_local std::string last_error;

aniso_status fail(aniso_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class Fn>
aniso_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return ANISO_OK;
  } catch (const aniso::InvalidEnvironment& e) {
    std::string msg = e.what();
    if (e.level() && msg.find("level") == std::string::npos) msg += " (level " + std::to_string(*e.level()) + ")";
    return fail(ANISO_ERR_INVALID_ENVIRONMENT, msg);
  } catch (const aniso::UnknownTest& e) {
    return fail(ANISO_ERR_UNKNOWN_TEST, e.what());
  } catch (const aniso::InvalidArgument& e) {
    return fail(ANISO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const aniso::OutOfRange& e) {
    return fail(ANISO_ERR_OUT_OF_RANGE, e.what());
  } catch (const aniso::Singularity& e) {
    return fail(ANISO_ERR_SINGULARITY, e.what());
  } catch (const aniso::DegenerateLaw& e) {
    return fail(ANISO_ERR_DEGENERATE, e.what());
  } catch (const aniso::IoError& e) {
    return fail(ANISO_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ANISO_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ANISO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ANISO_ERR_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw aniso::InvalidArgument(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

aniso::WalkMethod to_method(aniso_method m) {
  switch (m) {
    case ANISO_METHOD_DIRECT: return aniso::WalkMethod::direct;
    case ANISO_METHOD_CONSTRUCTIVE: return aniso::WalkMethod::constructive;
  }
  throw aniso::InvalidArgument("unknown walk method " + std::to_string(static_cast<int>(m)));
}

aniso::DensitySpec to_spec(double t, double g1, double g2, aniso_density_variant variant) {
  if (variant != ANISO_DENSITY_INVERSE && variant != ANISO_DENSITY_COMPLEMENT) {
    throw aniso::InvalidArgument("unknown density variant " + std::to_string(static_cast<int>(variant)));
  }
  return aniso::make_density_spec(
      t, g1, g2, variant == ANISO_DENSITY_INVERSE ? aniso::DensityVariant::inverse : aniso::DensityVariant::complement);
}

}  // namespace

extern "C" {

const char* aniso_version(void) { return ANISO_VERSION_STRING; }

const char* aniso_last_error(void) { return last_error.c_str(); }

const char* aniso_status_name(aniso_status status) {
  switch (status) {
    case ANISO_OK: return "ok";
    case ANISO_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ANISO_ERR_INVALID_ENVIRONMENT: return "invalid_environment";
    case ANISO_ERR_OUT_OF_RANGE: return "out_of_range";
    case ANISO_ERR_SINGULARITY: return "singularity";
    case ANISO_ERR_DEGENERATE: return "degenerate";
    case ANISO_ERR_UNKNOWN_TEST: return "unknown_test";
    case ANISO_ERR_IO: return "io";
    case ANISO_ERR_PARSE: return "parse";
    case ANISO_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void aniso_string_free(char* s) { std::free(s); }

uint64_t aniso_derive_seed(uint64_t master, const char* name, uint64_t index) {
  return aniso::derive_seed(master, name == nullptr ? "" : name, index);
}

aniso_status aniso_env_create(const char* text, aniso_env** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new aniso_env{aniso::environment_from_string(text)};
  });
}

void aniso_env_destroy(aniso_env* env) { delete env; }

aniso_status aniso_env_probability(const aniso_env* env, int64_t level, double* out) {
  return guarded([&] {
    require(env, "env");
    require(out, "out");
    *out = env->env.p(level);
  });
}

aniso_status aniso_env_validate(const aniso_env* env, int64_t probe_range, int* valid, int64_t* offending_level,
                                int* has_offending_level) {
  return guarded([&] {
    require(env, "env");
    require(valid, "valid");
    const auto verdict = aniso::validate_environment(env->env, probe_range);
    *valid = verdict.valid ? 1 : 0;
    if (has_offending_level) *has_offending_level = verdict.offending_level ? 1 : 0;
    if (offending_level) *offending_level = verdict.offending_level.value_or(0);
    if (!verdict.valid) last_error = verdict.reason;
  });
}

aniso_status aniso_env_cesaro(const aniso_env* env, int64_t n_max, aniso_cesaro* out) {
  return guarded([&] {
    require(env, "env");
    require(out, "out");
    const auto p = aniso::cesaro_estimate(env->env, n_max);
    out->gamma1 = p.gamma1;
    out->gamma2 = p.gamma2;
    out->has_tau = p.tau ? 1 : 0;
    out->tau = p.tau.value_or(std::numeric_limits<double>::quiet_NaN());
    out->swapped = p.swapped ? 1 : 0;
  });
}

aniso_status aniso_env_to_json(const aniso_env* env, char** json_out) {
  return guarded([&] {
    require(env, "env");
    require(json_out, "json_out");
    *json_out = dup_string(env->env.to_json().dump());
  });
}

aniso_status aniso_path_simulate(const aniso_env* env, uint64_t steps, uint64_t seed, aniso_method method,
                                 aniso_path** out) {
  return guarded([&] {
    require(env, "env");
    require(out, "out");
    const auto m = to_method(method);
    const auto verdict = aniso::validate_environment(env->env, 1024);
    if (!verdict.valid) throw aniso::InvalidEnvironment(verdict.reason, verdict.offending_level);
    auto* p = new aniso_path{aniso::WalkPath{}, {}};
    try {
      if (m == aniso::WalkMethod::direct) {
        p->path = aniso::simulate_direct(env->env, steps, seed);
        for (auto k : p->path.kinds) (k == aniso::StepKind::horizontal ? p->decomposition.H : p->decomposition.V)++;
        p->decomposition.H_star = p->decomposition.H;
      } else {
        auto walk = aniso::simulate_constructive(env->env, steps, seed);
        p->path = std::move(walk.path);
        p->decomposition = std::move(walk.decomposition);
      }
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

void aniso_path_destroy(aniso_path* path) { delete path; }

uint64_t aniso_path_steps(const aniso_path* path) { return path == nullptr ? 0 : path->path.steps(); }

aniso_status aniso_path_point(const aniso_path* path, uint64_t n, int64_t* c1, int64_t* c2) {
  return guarded([&] {
    require(path, "path");
    if (n >= path->path.positions.size()) {
      throw aniso::OutOfRange("step " + std::to_string(n) + " beyond path of " + std::to_string(path->path.steps()) +
                              " steps");
    }
    const auto& pt = path->path.positions[n];
    if (c1) *c1 = pt.x;
    if (c2) *c2 = pt.y;
  });
}

aniso_status aniso_path_step_kind(const aniso_path* path, uint64_t n, int* horizontal) {
  return guarded([&] {
    require(path, "path");
    require(horizontal, "horizontal");
    if (n >= path->path.kinds.size()) throw aniso::OutOfRange("step " + std::to_string(n) + " beyond path");
    *horizontal = path->path.kinds[n] == aniso::StepKind::horizontal ? 1 : 0;
  });
}

aniso_status aniso_path_decomposition(const aniso_path* path, aniso_decomposition* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    out->H = path->decomposition.H;
    out->V = path->decomposition.V;
    out->H_star = path->decomposition.H_star;
  });
}

aniso_status aniso_path_local_time(const aniso_path* path, int component, int64_t level, uint64_t horizon,
                                   uint64_t* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    if (component != 1 && component != 2) throw aniso::InvalidArgument("component must be 1 or 2");
    std::vector<std::int64_t> values;
    values.reserve(path->path.positions.size());
    for (const auto& pt : path->path.positions) values.push_back(component == 1 ? pt.x : pt.y);
    *out = aniso::local_time(values, level, horizon);
  });
}

aniso_status aniso_path_write_csv(const aniso_path* path, const char* file) {
  return guarded([&] {
    require(path, "path");
    require(file, "file");
    std::ofstream out(file);
    if (!out) throw aniso::IoError(std::string("cannot open '") + file + "' for writing");
    aniso::write_path_csv(path->path, out);
    if (!out) throw aniso::IoError(std::string("write failed for '") + file + "'");
  });
}

aniso_status aniso_path_decomposition_json(const aniso_path* path, char** json_out) {
  return guarded([&] {
    require(path, "path");
    require(json_out, "json_out");
    *json_out = dup_string(aniso::decomposition_json(path->decomposition).dump());
  });
}

aniso_status aniso_simulate_ensemble(const aniso_env* env, uint64_t steps, uint64_t replicas, uint64_t seed,
                                     aniso_method method, unsigned workers, aniso_endpoint* out) {
  return guarded([&] {
    require(env, "env");
    if (replicas > 0) require(out, "out");
    const auto m = to_method(method);
    const auto verdict = aniso::validate_environment(env->env, 1024);
    if (!verdict.valid) throw aniso::InvalidEnvironment(verdict.reason, verdict.offending_level);
    aniso::parallel_for(static_cast<std::size_t>(replicas), workers, [&](std::size_t r) {
      const auto s = aniso::simulate_summary(env->env, steps, aniso::derive_seed(seed, "simulate", r), m);
      out[r] = {s.end.x, s.end.y, s.H, s.V, s.H_star};
    });
  });
}

aniso_status aniso_oscillating_sample(double gamma1, double gamma2, double t, double dt, uint64_t replicas,
                                      uint64_t seed, unsigned workers, double* out) {
  return guarded([&] {
    if (replicas > 0) require(out, "out");
    if (!(t >= 0.0)) throw aniso::InvalidArgument("t must be nonnegative");
    const auto samples = aniso::verify::oscillating_samples(gamma1, gamma2, t, dt, static_cast<std::size_t>(replicas),
                                                            seed, workers);
    std::copy(samples.begin(), samples.end(), out);
  });
}

aniso_status aniso_timechange_create(double horizon, double dt, double gamma1, double gamma2, uint64_t seed,
                                     aniso_timechange** out) {
  return guarded([&] {
    require(out, "out");
    auto w = aniso::simulate_wiener(horizon, dt, seed);
    auto tc = aniso::additive_functional(w, gamma1, gamma2);
    *out = new aniso_timechange{std::move(w), std::move(tc)};
  });
}

void aniso_timechange_destroy(aniso_timechange* tc) { delete tc; }

aniso_status aniso_timechange_eval(const aniso_timechange* tc, double t, double* out) {
  return guarded([&] {
    require(tc, "tc");
    require(out, "out");
    *out = tc->tc.evaluate(t);
  });
}

aniso_status aniso_timechange_inverse(const aniso_timechange* tc, double s, double* out) {
  return guarded([&] {
    require(tc, "tc");
    require(out, "out");
    *out = aniso::inverse_time_change(tc->tc, s);
  });
}

aniso_status aniso_timechange_final(const aniso_timechange* tc, double* out) {
  return guarded([&] {
    require(tc, "tc");
    require(out, "out");
    *out = tc->tc.final_value();
  });
}

aniso_status aniso_timechange_wiener(const aniso_timechange* tc, double t, double* out) {
  return guarded([&] {
    require(tc, "tc");
    require(out, "out");
    *out = tc->wiener.at(t);
  });
}

aniso_status aniso_density(double t, double gamma1, double gamma2, aniso_density_variant variant, double v,
                           double* out) {
  return guarded([&] {
    require(out, "out");
    *out = aniso::density(to_spec(t, gamma1, gamma2, variant), v);
  });
}

aniso_status aniso_density_cdf(double t, double gamma1, double gamma2, aniso_density_variant variant, double v,
                               double* out) {
  return guarded([&] {
    require(out, "out");
    *out = aniso::density_cdf(to_spec(t, gamma1, gamma2, variant), v);
  });
}

aniso_status aniso_density_table(double t, double gamma1, double gamma2, aniso_density_variant variant,
                                 size_t points, aniso_density_row* rows) {
  return guarded([&] {
    require(rows, "rows");
    const auto table = aniso::density_table(to_spec(t, gamma1, gamma2, variant), points);
    for (std::size_t i = 0; i < table.size(); ++i) rows[i] = {table[i].v, table[i].pdf, table[i].cdf};
  });
}

aniso_status aniso_verify_run(const char* name, const char* params_json, uint64_t seed, unsigned workers,
                              char** report_json) {
  return guarded([&] {
    require(name, "name");
    require(report_json, "report_json");
    nlohmann::json params = nlohmann::json::object();
    if (params_json != nullptr && *params_json != '\0') params = nlohmann::json::parse(params_json);
    const auto report = aniso::verify::run_test(name, params, {seed, workers == 0 ? 1U : workers});
    *report_json = dup_string(report.to_json().dump());
  });
}

aniso_status aniso_verify_names(int acceptance, char** json_out) {
  return guarded([&] {
    require(json_out, "json_out");
    const auto& names = acceptance ? aniso::verify::acceptance_names() : aniso::verify::test_names();
    *json_out = dup_string(nlohmann::json(names).dump());
  });
}

aniso_status aniso_verify_expand(const char* suite, char** json_out) {
  return guarded([&] {
    require(suite, "suite");
    require(json_out, "json_out");
    *json_out = dup_string(nlohmann::json(aniso::verify::expand_suite(suite)).dump());
  });
}

}  // extern "C"
