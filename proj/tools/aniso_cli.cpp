// aniso: command-line front end over the C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "aniso/aniso.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct CliError {
  std::string code;
  std::string message;
};

[[noreturn]] void raise(std::string code, std::string message) { throw CliError{std::move(code), std::move(message)}; }

void check(aniso_status status) {
  if (status != ANISO_OK) raise(aniso_status_name(status), aniso_last_error());
}

std::string take(char* s) {
  std::string out(s);
  aniso_string_free(s);
  return out;
}

class EnvHandle {
 public:
  explicit EnvHandle(const std::string& text) { check(aniso_env_create(text.c_str(), &env_)); }
  ~EnvHandle() { aniso_env_destroy(env_); }
  EnvHandle(const EnvHandle&) = delete;
  EnvHandle& operator=(const EnvHandle&) = delete;
  const aniso_env* get() const { return env_; }

 private:
  aniso_env* env_ = nullptr;
};

// ---------------------------------------------------------------------------
// Options shared by every command. Unset flags fall back to the config file.

struct Options {
  std::string config_file;
  std::optional<std::string> env;
  std::optional<std::string> n;
  std::optional<std::string> n_grid;
  std::optional<std::uint64_t> replicas;
  std::optional<std::uint64_t> bm_replicas;
  std::optional<std::uint64_t> mc_samples;
  std::optional<std::uint64_t> paths;
  std::optional<double> dt;
  std::optional<double> t;
  std::optional<double> g1;
  std::optional<double> g2;
  std::optional<double> tau;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> suite;
  std::optional<std::string> format;
  std::optional<std::string> kind;
  std::optional<std::string> method;
  std::optional<std::string> process;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> points;
  std::optional<std::uint64_t> bins;
  std::vector<std::string> params;
  std::string run_dir;
  std::optional<std::string> import_file;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_file, "JSON experiment config; flags override its fields");
  cmd->add_option("--seed", o.seed, "master seed (overrides ANISO_SEED and the config)");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--out", o.out, "output directory (file for export)");
}

void add_env(CLI::App* cmd, Options& o) {
  cmd->add_option("--env", o.env, "preset (simple, comb, hphc), inline JSON, or JSON file");
}

// ---------------------------------------------------------------------------

struct Config {
  json doc = json::object();
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out;
};

json read_json_file(const std::string& file, const std::string& what) {
  std::ifstream in(file);
  if (!in) raise("io", "cannot read " + what + " '" + file + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise("parse", what + " '" + file + "' is not valid JSON: " + e.what());
  }
}

json parse_count(const std::string& text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
      raise("invalid_argument", "integer out of range: " + text);
    }
  }
  return text;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

/// Seed precedence: config < ANISO_SEED < --seed.
Config resolve(const Options& o, const std::string& default_out) {
  Config c;
  if (!o.config_file.empty()) {
    c.doc = read_json_file(o.config_file, "config");
    if (!c.doc.is_object()) raise("parse", "config '" + o.config_file + "' must be a JSON object");
  }
  auto& d = c.doc;
  if (!d.contains("params")) d["params"] = json::object();
  if (o.env) d["env"] = *o.env;
  if (o.n) d["N"] = parse_count(*o.n);
  if (o.n_grid) d["n_grid"] = *o.n_grid;
  if (o.replicas) d["replicas"] = *o.replicas;
  if (o.bm_replicas) d["bm_replicas"] = *o.bm_replicas;
  if (o.mc_samples) d["mc_samples"] = *o.mc_samples;
  if (o.paths) d["paths"] = *o.paths;
  if (o.dt) d["dt"] = *o.dt;
  if (o.t) d["t"] = *o.t;
  if (o.g1) d["g1"] = *o.g1;
  if (o.g2) d["g2"] = *o.g2;
  if (o.tau) d["tau"] = *o.tau;
  if (o.threshold) d["threshold"] = *o.threshold;
  if (o.suite) d["suite"] = *o.suite;
  if (o.kind) d["kind"] = *o.kind;
  if (o.method) d["method"] = *o.method;
  if (o.process) d["process"] = *o.process;
  if (o.variant) d["variant"] = *o.variant;
  if (o.points) d["points"] = *o.points;
  if (o.bins) d["bins"] = *o.bins;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) raise("usage", "--param expects key=value, got '" + kv + "'");
    const auto key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    try {
      d["params"][key] = json::parse(value);
    } catch (const json::exception&) {
      d["params"][key] = value;
    }
  }

  if (d.contains("seed")) {
    if (!d["seed"].is_number_unsigned() && !d["seed"].is_number_integer()) raise("parse", "config seed must be an integer");
    c.seed = d["seed"].get<std::uint64_t>();
  }
  if (const char* s = std::getenv("ANISO_SEED"); s != nullptr && *s != '\0') {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(s, &used, 0);
      if (used != std::strlen(s)) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      raise("invalid_argument", std::string("ANISO_SEED is not an integer: '") + s + "'");
    }
  }
  if (o.seed) c.seed = *o.seed;
  d["seed"] = c.seed;

  c.workers = std::max(1U, std::thread::hardware_concurrency());
  if (d.contains("workers")) c.workers = d["workers"].get<unsigned>();
  if (o.workers) c.workers = *o.workers;
  if (c.workers == 0) raise("invalid_argument", "--workers must be positive");

  c.out = d.value("out", default_out);
  if (o.out) c.out = *o.out;
  return c;
}

template <class T>
T field(const Config& c, const std::string& key, T fallback) {
  if (!c.doc.contains(key)) return fallback;
  try {
    return c.doc.at(key).get<T>();
  } catch (const json::exception&) {
    raise("invalid_argument", "field '" + key + "' has the wrong type");
  }
}

std::uint64_t count_field(const Config& c, const std::string& key, std::uint64_t fallback) {
  if (!c.doc.contains(key)) return fallback;
  const auto& v = c.doc.at(key);
  if (v.is_number_unsigned() || v.is_number_integer()) {
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) raise("invalid_argument", key + " must be nonnegative");
    return v.get<std::uint64_t>();
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (const auto caret = s.find('^'); caret != std::string::npos) {
      const auto base = std::stoull(s.substr(0, caret));
      const auto exp = std::stoull(s.substr(caret + 1));
      if (exp > 62) raise("invalid_argument", key + " too large");
      std::uint64_t r = 1;
      for (std::uint64_t i = 0; i < exp; ++i) r *= base;
      return r;
    }
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
    }
  }
  raise("invalid_argument", "field '" + key + "' must be a nonnegative integer");
}

std::string env_text(const Config& c, const std::string& fallback) {
  if (!c.doc.contains("env")) return fallback;
  const auto& e = c.doc.at("env");
  return e.is_string() ? e.get<std::string>() : e.dump();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) raise("io", "cannot create output directory '" + dir + "'");
  const auto probe = fs::path(dir) / ".write_probe";
  {
    std::ofstream test(probe);
    if (!test) raise("io", "output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) raise("io", "cannot write '" + file.string() + "'");
  out << text;
  if (!out) raise("io", "write failed for '" + file.string() + "'");
}

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

class Manifest {
 public:
  Manifest(std::string command, const Config& c) : command_(std::move(command)), config_(c.doc) {
    started_ = utc_now();
  }

  void output(const std::string& relative) { outputs_.push_back(relative); }
  void result(const json& report, const std::string& file) {
    results_.push_back({{"test", report.at("test")},
                        {"pass", report.at("pass")},
                        {"statistic", report.at("statistic")},
                        {"threshold", report.at("threshold")},
                        {"report", file}});
  }

  json document() const {
    std::size_t passed = 0;
    for (const auto& r : results_) passed += r.at("pass").get<bool>() ? 1 : 0;
    const auto canonical = config_.dump();
    return {{"artifact_version", aniso_version()},
            {"command", command_},
            {"config", config_},
            {"config_hash", hex64(aniso_derive_seed(0, canonical.c_str(), 0))},
            {"timestamps", {{"started", started_}, {"finished", utc_now()}}},
            {"outputs", outputs_},
            {"results", results_},
            {"summary", {{"tests", results_.size()}, {"passed", passed}, {"failed", results_.size() - passed}}}};
  }

  void write(const std::string& dir) const { write_text(fs::path(dir) / "manifest.json", document().dump(2) + "\n"); }

 private:
  std::string command_;
  json config_;
  std::string started_;
  std::vector<std::string> outputs_;
  json results_ = json::array();
};

// ---------------------------------------------------------------------------
// simulate

std::string histogram_csv(const std::vector<double>& values, std::size_t bins) {
  double lo = values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
  double hi = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<std::uint64_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
    counts[std::min(b, bins - 1)]++;
  }
  std::ostringstream s;
  s << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < bins; ++i) {
    s << format_double(lo + width * static_cast<double>(i)) << ','
      << format_double(i + 1 == bins ? hi : lo + width * static_cast<double>(i + 1)) << ',' << counts[i] << '\n';
  }
  return s.str();
}

aniso_method method_of(const Config& c) {
  const auto m = field<std::string>(c, "method", "direct");
  if (m == "direct") return ANISO_METHOD_DIRECT;
  if (m == "constructive") return ANISO_METHOD_CONSTRUCTIVE;
  raise("invalid_argument", "unknown method '" + m + "' (direct, constructive)");
}

int cmd_simulate(const Options& o) {
  const auto c = resolve(o, "run");
  const auto process = field<std::string>(c, "process", "walk");
  const auto replicas = count_field(c, "replicas", 1);
  const auto bins = count_field(c, "bins", 50);
  if (bins == 0) raise("invalid_argument", "--bins must be positive");
  Manifest manifest("simulate", c);

  if (process == "obm") {
    const double g1 = field<double>(c, "g1", 2.0);
    const double g2 = field<double>(c, "g2", 1.0);
    const double t = field<double>(c, "t", 1.0);
    const double dt = field<double>(c, "dt", 1e-4);
    std::vector<double> y(replicas);
    check(aniso_oscillating_sample(g1, g2, t, dt, replicas, c.seed, c.workers, y.data()));
    ensure_dir(c.out);
    std::ostringstream s;
    s << "replica,y\n";
    for (std::size_t r = 0; r < y.size(); ++r) s << r << ',' << format_double(y[r]) << '\n';
    write_text(fs::path(c.out) / "samples.csv", s.str());
    write_text(fs::path(c.out) / "histogram.csv", histogram_csv(y, bins));
    manifest.output("samples.csv");
    manifest.output("histogram.csv");
    manifest.write(c.out);
    std::cout << "wrote " << replicas << " samples of Y(" << format_double(t) << ") to " << c.out << "\n";
    return kExitPass;
  }
  if (process != "walk") raise("invalid_argument", "unknown process '" + process + "' (walk, obm)");

  const EnvHandle env(env_text(c, "hphc"));
  const auto n = count_field(c, "N", 1000);
  const auto method = method_of(c);
  if (replicas == 1) {
    aniso_path* path = nullptr;
    check(aniso_path_simulate(env.get(), n, c.seed, method, &path));
    std::unique_ptr<aniso_path, void (*)(aniso_path*)> guard(path, aniso_path_destroy);
    ensure_dir(c.out);
    check(aniso_path_write_csv(path, (fs::path(c.out) / "path.csv").c_str()));
    char* dec = nullptr;
    check(aniso_path_decomposition_json(path, &dec));
    write_text(fs::path(c.out) / "decomposition.json", json::parse(take(dec)).dump(2) + "\n");
    manifest.output("path.csv");
    manifest.output("decomposition.json");
    manifest.write(c.out);
    std::int64_t c1 = 0;
    std::int64_t c2 = 0;
    check(aniso_path_point(path, aniso_path_steps(path), &c1, &c2));
    std::cout << "C(" << n << ") = (" << c1 << ", " << c2 << "); wrote " << c.out << "/path.csv\n";
    return kExitPass;
  }

  std::vector<aniso_endpoint> ends(replicas);
  check(aniso_simulate_ensemble(env.get(), n, replicas, c.seed, method, c.workers, ends.data()));
  ensure_dir(c.out);
  std::ostringstream s;
  s << "replica,c1,c2,H,V,H_star\n";
  std::vector<double> scaled;
  scaled.reserve(ends.size());
  const double norm = n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  for (std::size_t r = 0; r < ends.size(); ++r) {
    const auto& e = ends[r];
    s << r << ',' << e.c1 << ',' << e.c2 << ',' << e.H << ',' << e.V << ',' << e.H_star << '\n';
    scaled.push_back(static_cast<double>(e.c2) * norm);
  }
  write_text(fs::path(c.out) / "endpoints.csv", s.str());
  write_text(fs::path(c.out) / "histogram_c2.csv", histogram_csv(scaled, bins));
  manifest.output("endpoints.csv");
  manifest.output("histogram_c2.csv");
  manifest.write(c.out);
  std::cout << "wrote " << replicas << " endpoints to " << c.out << "/endpoints.csv\n";
  return kExitPass;
}

// ---------------------------------------------------------------------------
// verify, lil, equivalence

/// Params for one test: config "params" plus the top-level fields the test understands.
json test_params(const Config& c) {
  json p = c.doc.at("params");
  static const char* keys[] = {"env",  "N",  "n_grid", "replicas", "bm_replicas", "mc_samples", "paths",
                               "dt",   "t",  "g1",     "g2",       "tau",         "threshold",  "kind"};
  for (const char* k : keys) {
    if (c.doc.contains(k) && !p.contains(k)) p[k] = c.doc.at(k);
  }
  return p;
}

std::vector<std::string> expand(const std::string& suite) {
  char* out = nullptr;
  check(aniso_verify_expand(suite.c_str(), &out));
  return json::parse(take(out)).get<std::vector<std::string>>();
}

/// Acceptance entries run pinned settings; only base tests receive user params.
bool is_acceptance(const std::string& name) {
  static const auto names = [] {
    char* out = nullptr;
    check(aniso_verify_names(1, &out));
    return json::parse(take(out)).get<std::vector<std::string>>();
  }();
  return std::find(names.begin(), names.end(), name) != names.end();
}

int run_suite(const std::string& command, const Options& o, const std::vector<std::string>& tests,
              const std::function<void(const json&)>& describe) {
  const auto c = resolve(o, "run");
  ensure_dir(c.out);
  ensure_dir((fs::path(c.out) / "reports").string());
  Manifest manifest(command, c);
  const auto params = test_params(c);
  const auto param_text = params.dump();
  bool all_pass = true;
  for (const auto& name : tests) {
    char* out = nullptr;
    check(aniso_verify_run(name.c_str(), is_acceptance(name) ? "{}" : param_text.c_str(), c.seed, c.workers, &out));
    const auto report = json::parse(take(out));
    const auto file = "reports/" + name + ".json";
    write_text(fs::path(c.out) / file, report.dump(2) + "\n");
    manifest.output(file);
    manifest.result(report, file);
    const bool pass = report.at("pass").get<bool>();
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << " statistic=" << report.at("statistic").get<double>()
              << " threshold=" << report.at("threshold").get<double>() << "\n";
    if (describe) describe(report);
  }
  manifest.write(c.out);
  return all_pass ? kExitPass : kExitFail;
}

int cmd_verify(const Options& o) {
  const auto c = resolve(o, "run");
  return run_suite("verify", o, expand(field<std::string>(c, "suite", "all")), nullptr);
}

int cmd_lil(const Options& o) {
  return run_suite("lil", o, {"lil"}, [](const json& report) {
    for (const auto& [kind, d] : report.at("details").at("kinds").items()) {
      for (const auto& t : d.at("tracks")) {
        std::cout << "  " << kind << ": " << t.at("name").get<std::string>()
                  << " final/target=" << format_double(t.at("final_normalized").get<double>())
                  << (t.at("gated").get<bool>() ? "" : " (reported only)") << "\n";
      }
    }
  });
}

int cmd_equivalence(const Options& o) {
  return run_suite("equivalence", o, {"equivalence"}, [](const json& report) {
    std::cout << "  support=" << report.at("details").at("support_size")
              << " samples=" << report.at("details").at("samples") << "\n";
  });
}

// ---------------------------------------------------------------------------
// density

int cmd_density(const Options& o) {
  const auto c = resolve(o, "");
  const double t = field<double>(c, "t", 1.0);
  const double g1 = field<double>(c, "g1", 2.0);
  const double g2 = field<double>(c, "g2", 1.0);
  const auto points = count_field(c, "points", 201);
  const auto variant_name = field<std::string>(c, "variant", "inverse");
  aniso_density_variant variant = ANISO_DENSITY_INVERSE;
  if (variant_name == "complement") {
    variant = ANISO_DENSITY_COMPLEMENT;
  } else if (variant_name != "inverse") {
    raise("invalid_argument", "unknown variant '" + variant_name + "' (inverse, complement)");
  }
  if (g1 == g2 && g1 >= 1.0 && t > 0.0) {
    const double atom = variant == ANISO_DENSITY_INVERSE ? t / g1 : t - t / g1;
    std::cout << "point mass at v = " << format_double(atom) << " (gamma1 = gamma2 = " << format_double(g1)
              << "; no density)\n";
    return kExitPass;
  }
  std::vector<aniso_density_row> rows(points);
  check(aniso_density_table(t, g1, g2, variant, points, rows.data()));
  std::ostringstream s;
  s << "v,pdf,cdf\n";
  for (const auto& r : rows) s << format_double(r.v) << ',' << format_double(r.pdf) << ',' << format_double(r.cdf) << '\n';
  if (c.out.empty()) {
    std::cout << s.str();
    return kExitPass;
  }
  ensure_dir(c.out);
  write_text(fs::path(c.out) / "density.csv", s.str());
  Manifest manifest("density", c);
  manifest.output("density.csv");
  manifest.write(c.out);
  std::cout << "wrote " << points << " rows to " << c.out << "/density.csv\n";
  return kExitPass;
}

// ---------------------------------------------------------------------------
// export

json load_manifest(const std::string& dir) {
  const auto file = fs::path(dir) / "manifest.json";
  if (!fs::exists(file)) raise("io", "no manifest.json in run directory '" + dir + "'");
  std::ifstream in(file);
  try {
    auto doc = json::parse(in);
    if (!doc.is_object() || !doc.contains("results") || !doc.contains("outputs")) {
      raise("parse", "manifest.json in '" + dir + "' is missing required fields");
    }
    return doc;
  } catch (const json::exception& e) {
    raise("parse", "manifest.json in '" + dir + "' is corrupt: " + e.what());
  }
}

std::string csv_export(const json& consolidated) {
  std::ostringstream s;
  s << "test,statistic,threshold,pass,slope,intercept,r_squared\n";
  for (const auto& [name, report] : consolidated.at("reports").items()) {
    s << name << ',' << format_double(report.at("statistic").get<double>()) << ','
      << format_double(report.at("threshold").get<double>()) << ',' << (report.at("pass").get<bool>() ? "true" : "false");
    const auto& details = report.at("details");
    if (details.contains("fit")) {
      const auto& fit = details.at("fit");
      s << ',' << format_double(fit.at("slope").get<double>()) << ',' << format_double(fit.at("intercept").get<double>())
        << ',' << format_double(fit.at("r_squared").get<double>());
    } else {
      s << ",,,";
    }
    s << '\n';
  }
  return s.str();
}

int cmd_export(const Options& o) {
  if (o.import_file) {
    // Re-import: rebuild a run directory from a consolidated JSON export.
    const auto doc = read_json_file(*o.import_file, "export");
    if (!doc.contains("manifest") || !doc.contains("reports")) {
      raise("parse", "'" + *o.import_file + "' is not a consolidated export");
    }
    const std::string dir = o.out.value_or(o.run_dir);
    if (dir.empty()) raise("usage", "--import needs a target directory (positional or --out)");
    ensure_dir(dir);
    for (const auto& r : doc.at("manifest").at("results")) {
      const auto file = r.at("report").get<std::string>();
      const auto name = r.at("test").get<std::string>();
      fs::create_directories((fs::path(dir) / file).parent_path());
      write_text(fs::path(dir) / file, doc.at("reports").at(name).dump(2) + "\n");
    }
    write_text(fs::path(dir) / "manifest.json", doc.at("manifest").dump(2) + "\n");
    std::cout << "imported " << doc.at("reports").size() << " reports into " << dir << "\n";
    return kExitPass;
  }
  if (o.run_dir.empty()) raise("usage", "export needs a run directory");
  const auto manifest = load_manifest(o.run_dir);
  json consolidated = {{"manifest", manifest}, {"reports", json::object()}};
  for (const auto& r : manifest.at("results")) {
    const auto file = r.at("report").get<std::string>();
    consolidated["reports"][r.at("test").get<std::string>()] =
        read_json_file((fs::path(o.run_dir) / file).string(), "report");
  }
  const auto format = o.format.value_or("json");
  std::string text;
  if (format == "json") {
    text = consolidated.dump(2) + "\n";
  } else if (format == "csv") {
    text = csv_export(consolidated);
  } else {
    raise("invalid_argument", "unknown format '" + format + "' (csv, json)");
  }
  const auto target = o.out ? fs::path(*o.out) : fs::path(o.run_dir) / ("export." + format);
  write_text(target, text);
  std::cout << "wrote " << target.string() << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic lattice walks, oscillating Brownian motion and their verification suite", "aniso"};
  app.set_version_flag("--version", std::string(aniso_version()));
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "simulate paths or endpoint ensembles");
  add_common(simulate, o);
  add_env(simulate, o);
  simulate->add_option("--N", o.n, "number of steps");
  simulate->add_option("--replicas", o.replicas, "ensemble size (1 writes the full path)");
  simulate->add_option("--method", o.method, "direct or constructive");
  simulate->add_option("--process", o.process, "walk or obm (oscillating Brownian motion)");
  simulate->add_option("--g1", o.g1, "gamma1 for obm");
  simulate->add_option("--g2", o.g2, "gamma2 for obm");
  simulate->add_option("--t", o.t, "sample time for obm");
  simulate->add_option("--dt", o.dt, "grid step for obm");
  simulate->add_option("--bins", o.bins, "histogram bins");

  auto* verify = app.add_subcommand("verify", "run verification tests");
  add_common(verify, o);
  add_env(verify, o);
  verify->add_option("--suite", o.suite, "'all' or comma-separated test names");
  verify->add_option("--N", o.n, "steps (or N_max)");
  verify->add_option("--n-grid", o.n_grid, "N grid, e.g. 2^10..2^20 or 1024,2048");
  verify->add_option("--replicas", o.replicas, "walk replicas");
  verify->add_option("--bm-replicas", o.bm_replicas, "oscillating BM replicas");
  verify->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples");
  verify->add_option("--paths", o.paths, "Wiener paths");
  verify->add_option("--dt", o.dt, "Wiener grid step");
  verify->add_option("--t", o.t, "time argument");
  verify->add_option("--g1", o.g1, "gamma1");
  verify->add_option("--g2", o.g2, "gamma2");
  verify->add_option("--tau", o.tau, "rate exponent override");
  verify->add_option("--threshold", o.threshold, "pass threshold");
  verify->add_option("--kind", o.kind, "LIL kind");
  verify->add_option("--param", o.params, "extra test parameter key=value (repeatable)");

  auto* density = app.add_subcommand("density", "tabulate the law of A^-1(t) or t - A^-1(t)");
  add_common(density, o);
  density->add_option("--t", o.t, "time t > 0");
  density->add_option("--g1", o.g1, "gamma1");
  density->add_option("--g2", o.g2, "gamma2");
  density->add_option("--points", o.points, "rows in the table");
  density->add_option("--variant", o.variant, "inverse or complement");

  auto* lil = app.add_subcommand("lil", "iterated-logarithm diagnostics along single trajectories");
  add_common(lil, o);
  add_env(lil, o);
  lil->add_option("--kind", o.kind, "walk_max, local_time_max, c1, c2 or all");
  lil->add_option("--N", o.n, "N_max (dyadic, >= 2^16)");
  lil->add_option("--param", o.params, "extra parameter key=value");

  auto* equivalence = app.add_subcommand("equivalence", "exact versus constructive law of C(N)");
  add_common(equivalence, o);
  add_env(equivalence, o);
  equivalence->add_option("--N", o.n, "steps (<= 8)");
  equivalence->add_option("--mc-samples", o.mc_samples, "constructive samples");
  equivalence->add_option("--threshold", o.threshold, "TV threshold");

  auto* exporter = app.add_subcommand("export", "merge a run directory into one file");
  exporter->add_option("run_dir", o.run_dir, "run directory containing manifest.json");
  exporter->add_option("--format", o.format, "json or csv");
  exporter->add_option("--out", o.out, "output file (directory with --import)");
  exporter->add_option("--import", o.import_file, "rebuild a run directory from a JSON export");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    std::cout << aniso_version() << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: usage: " << msg << "\n";
    return kExitError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (verify->parsed()) return cmd_verify(o);
    if (density->parsed()) return cmd_density(o);
    if (lil->parsed()) return cmd_lil(o);
    if (equivalence->parsed()) return cmd_equivalence(o);
    if (exporter->parsed()) return cmd_export(o);
  } catch (const CliError& e) {
    std::string msg = e.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << e.code << ": " << msg << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
