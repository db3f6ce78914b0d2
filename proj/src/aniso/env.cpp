#include "aniso/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aniso/errors.hpp"
#include "aniso/stats.hpp"

namespace aniso {

std::string_view to_string(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::uniform: return "uniform";
    case EnvironmentKind::comb: return "comb";
    case EnvironmentKind::hphc: return "hphc";
    case EnvironmentKind::level_set: return "level_set";
    case EnvironmentKind::periodic: return "periodic";
    case EnvironmentKind::table: return "table";
  }
  return "unknown";
}

EnvironmentSpec EnvironmentSpec::uniform(double p) {
  EnvironmentSpec s;
  s.kind = EnvironmentKind::uniform;
  s.p = p;
  return s;
}

EnvironmentSpec EnvironmentSpec::comb() {
  EnvironmentSpec s;
  s.kind = EnvironmentKind::comb;
  return s;
}

EnvironmentSpec EnvironmentSpec::hphc() {
  EnvironmentSpec s;
  s.kind = EnvironmentKind::hphc;
  return s;
}

EnvironmentSpec EnvironmentSpec::level_set(std::vector<LevelInterval> set, double p_in, double p_out) {
  EnvironmentSpec s;
  s.kind = EnvironmentKind::level_set;
  s.set = std::move(set);
  s.p_in = p_in;
  s.p_out = p_out;
  return s;
}

EnvironmentSpec EnvironmentSpec::periodic(std::vector<double> values) {
  EnvironmentSpec s;
  s.kind = EnvironmentKind::periodic;
  s.period = std::move(values);
  return s;
}

EnvironmentSpec EnvironmentSpec::table(std::map<std::int64_t, double> levels, double fallback) {
  EnvironmentSpec s;
  s.kind = EnvironmentKind::table;
  s.levels = std::move(levels);
  s.fallback = fallback;
  return s;
}

Environment Environment::unvalidated(EnvironmentSpec spec) {
  if (spec.kind == EnvironmentKind::periodic && spec.period.empty()) {
    throw InvalidEnvironment("periodic environment needs at least one value");
  }
  return Environment(std::move(spec), false);
}

double Environment::raw(std::int64_t j) const {
  switch (spec_.kind) {
    case EnvironmentKind::uniform: return spec_.p;
    case EnvironmentKind::comb: return j == 0 ? 0.25 : 0.5;
    case EnvironmentKind::hphc: return j >= 0 ? 0.25 : 0.5;
    case EnvironmentKind::level_set:
      for (const auto& iv : spec_.set) {
        if (iv.contains(j)) return spec_.p_in;
      }
      return spec_.p_out;
    case EnvironmentKind::periodic: {
      const auto len = static_cast<std::int64_t>(spec_.period.size());
      const auto r = ((j % len) + len) % len;
      return spec_.period[static_cast<std::size_t>(r)];
    }
    case EnvironmentKind::table: {
      const auto it = spec_.levels.find(j);
      return it == spec_.levels.end() ? spec_.fallback : it->second;
    }
  }
  return spec_.p;
}

double Environment::p(std::int64_t level) const { return raw(mirrored_ ? -level : level); }

Environment Environment::reflected() const { return Environment(spec_, !mirrored_); }

std::vector<double> Environment::attainable_values() const {
  std::vector<double> out;
  switch (spec_.kind) {
    case EnvironmentKind::uniform: out = {spec_.p}; break;
    case EnvironmentKind::comb:
    case EnvironmentKind::hphc: out = {0.25, 0.5}; break;
    case EnvironmentKind::level_set: {
      const bool everything = std::any_of(spec_.set.begin(), spec_.set.end(),
                                          [](const LevelInterval& iv) { return !iv.lo && !iv.hi; });
      bool any_in = false;
      for (const auto& iv : spec_.set) {
        if (!iv.lo || !iv.hi || *iv.lo <= *iv.hi) any_in = true;
      }
      if (any_in) out.push_back(spec_.p_in);
      if (!everything) out.push_back(spec_.p_out);
      break;
    }
    case EnvironmentKind::periodic: out = spec_.period; break;
    case EnvironmentKind::table:
      for (const auto& [level, p] : spec_.levels) out.push_back(p);
      out.push_back(spec_.fallback);
      break;
  }
  return out;
}

nlohmann::json Environment::to_json() const {
  nlohmann::json doc;
  doc["kind"] = std::string(to_string(spec_.kind));
  switch (spec_.kind) {
    case EnvironmentKind::uniform: doc["p"] = spec_.p; break;
    case EnvironmentKind::comb:
    case EnvironmentKind::hphc: break;
    case EnvironmentKind::level_set: {
      nlohmann::json set = nlohmann::json::array();
      for (const auto& iv : spec_.set) {
        set.push_back({iv.lo ? nlohmann::json(*iv.lo) : nlohmann::json(nullptr),
                       iv.hi ? nlohmann::json(*iv.hi) : nlohmann::json(nullptr)});
      }
      doc["set"] = set;
      doc["p_in"] = spec_.p_in;
      doc["p_out"] = spec_.p_out;
      break;
    }
    case EnvironmentKind::periodic: doc["values"] = spec_.period; break;
    case EnvironmentKind::table: {
      nlohmann::json levels = nlohmann::json::object();
      for (const auto& [level, p] : spec_.levels) levels[std::to_string(level)] = p;
      doc["levels"] = levels;
      doc["default"] = spec_.fallback;
      break;
    }
  }
  if (mirrored_) doc["mirrored"] = true;
  return doc;
}

std::string Environment::describe() const {
  std::string s(to_string(spec_.kind));
  if (spec_.kind == EnvironmentKind::uniform) {
    std::ostringstream os;
    os << "uniform(" << spec_.p << ")";
    s = os.str();
  }
  if (mirrored_) s += "[mirrored]";
  return s;
}

namespace {

bool in_bounds(double p) { return p > 0.0 && p <= 0.5; }

}  // namespace

Environment make_environment(const EnvironmentSpec& spec) {
  Environment env = Environment::unvalidated(spec);
  bool any_below = false;
  for (double p : env.attainable_values()) {
    if (!in_bounds(p)) {
      std::ostringstream os;
      os << "probability " << p << " outside (0, 1/2]";
      // Locate a level for the message where one is identifiable.
      std::optional<std::int64_t> level;
      if (spec.kind == EnvironmentKind::table) {
        for (const auto& [j, q] : spec.levels) {
          if (q == p) {
            level = j;
            break;
          }
        }
      }
      if (level) os << " at level " << *level;
      throw InvalidEnvironment(os.str(), level);
    }
    if (p < 0.5) any_below = true;
  }
  if (!any_below) throw InvalidEnvironment("all levels have p = 1/2: walk is one-dimensional");
  return env;
}

namespace {

double number_field(const nlohmann::json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) throw InvalidEnvironment(std::string("field '") + key + "' must be a number");
  return doc.at(key).get<double>();
}

std::optional<std::int64_t> bound(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer()) throw InvalidEnvironment("level bounds must be integers or null");
  return v.get<std::int64_t>();
}

}  // namespace

Environment environment_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    throw InvalidEnvironment("environment must be an object with a string 'kind'");
  }
  const auto kind = doc.at("kind").get<std::string>();
  EnvironmentSpec spec;
  if (kind == "uniform") {
    spec = EnvironmentSpec::uniform(number_field(doc, "p", 0.25));
  } else if (kind == "simple") {
    spec = EnvironmentSpec::uniform(0.25);
  } else if (kind == "comb") {
    spec = EnvironmentSpec::comb();
  } else if (kind == "hphc") {
    spec = EnvironmentSpec::hphc();
  } else if (kind == "level_set") {
    std::vector<LevelInterval> set;
    if (doc.contains("set")) {
      for (const auto& item : doc.at("set")) {
        if (item.is_number_integer()) {
          set.push_back({item.get<std::int64_t>(), item.get<std::int64_t>()});
        } else if (item.is_array() && item.size() == 2) {
          set.push_back({bound(item[0]), bound(item[1])});
        } else {
          throw InvalidEnvironment("level_set entries must be integers or [lo, hi] pairs");
        }
      }
    }
    spec = EnvironmentSpec::level_set(std::move(set), number_field(doc, "p_in", 0.25),
                                      number_field(doc, "p_out", 0.5));
  } else if (kind == "periodic") {
    if (!doc.contains("values") || !doc.at("values").is_array()) {
      throw InvalidEnvironment("periodic environment needs a 'values' array");
    }
    spec = EnvironmentSpec::periodic(doc.at("values").get<std::vector<double>>());
  } else if (kind == "table") {
    std::map<std::int64_t, double> levels;
    if (doc.contains("levels")) {
      for (const auto& [key, value] : doc.at("levels").items()) {
        std::int64_t level = 0;
        try {
          std::size_t used = 0;
          level = std::stoll(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw InvalidEnvironment("table level key '" + key + "' is not an integer");
        }
        if (!value.is_number()) throw InvalidEnvironment("table values must be numbers");
        levels[level] = value.get<double>();
      }
    }
    spec = EnvironmentSpec::table(std::move(levels), number_field(doc, "default", 0.5));
  } else {
    throw InvalidEnvironment("unknown environment kind '" + kind + "'");
  }
  Environment env = make_environment(spec);
  if (doc.value("mirrored", false)) env = env.reflected();
  return env;
}

Environment environment_from_string(std::string_view text) {
  if (text == "comb" || text == "hphc" || text == "simple" || text == "uniform") {
    return environment_from_json({{"kind", std::string(text)}});
  }
  nlohmann::json doc;
  if (!text.empty() && text.front() == '{') {
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidEnvironment(std::string("environment JSON: ") + e.what());
    }
  } else {
    std::ifstream in{std::string(text)};
    if (!in) throw InvalidEnvironment("unknown preset or unreadable file '" + std::string(text) + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidEnvironment(std::string("environment file: ") + e.what());
    }
  }
  return environment_from_json(doc);
}

ValidityVerdict validate_environment(const Environment& env, std::int64_t probe_range) {
  if (probe_range < 1) throw InvalidArgument("probe_range must be >= 1");
  bool any_below = false;
  for (std::int64_t j = -probe_range; j <= probe_range; ++j) {
    const double p = env.p(j);
    if (!in_bounds(p)) {
      std::ostringstream os;
      os << "p(" << j << ") = " << p << " outside (0, 1/2]";
      return {false, j, os.str()};
    }
    if (p < 0.5) any_below = true;
  }
  if (!any_below) return {false, std::nullopt, "all probed levels have p = 1/2"};
  return {};
}

namespace {

struct SideEstimate {
  double gamma = 1.0;
  std::optional<double> tau;
  std::vector<double> residuals;
};

SideEstimate estimate_side(const Environment& env, int sign, std::int64_t n_max,
                           const std::vector<std::int64_t>& dyadic) {
  std::vector<double> avg(static_cast<std::size_t>(n_max) + 1, 0.0);
  double sum = 0.0;
  double compensation = 0.0;
  // The limit lies between the extremes of 1/p over all levels, not just the probed ones.
  double lo = INFINITY;
  double hi = 0.0;
  for (double p : env.attainable_values()) {
    lo = std::min(lo, 1.0 / p);
    hi = std::max(hi, 1.0 / p);
  }
  for (std::int64_t j = 1; j <= n_max; ++j) {
    const double inv = 1.0 / env.p(sign * j);
    const double y = inv - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
    avg[static_cast<std::size_t>(j)] = sum / static_cast<double>(j);
  }
  const auto at = [&](std::int64_t k) { return avg[static_cast<std::size_t>(k)]; };
  const double scale = std::abs(at(n_max));
  const double negligible = 1e-13 * scale;

  SideEstimate out;
  double two_gamma = at(n_max);

  std::vector<std::pair<double, double>> diffs;
  for (std::int64_t k : dyadic) {
    if (2 * k > n_max) break;
    const double d = at(2 * k) - at(k);
    if (std::abs(d) > negligible) diffs.emplace_back(static_cast<double>(k), std::abs(d));
  }
  // The rate is read off the largest prefixes, where lower-order terms have died out.
  if (diffs.size() > 4) diffs.erase(diffs.begin(), diffs.end() - 4);
  if (diffs.size() >= 2) {
    const double tau1 = -fit_loglog(diffs, 2).slope;
    if (tau1 > 0.0) {
      const double tail = (at(n_max) - at(n_max / 2)) / (1.0 - std::exp2(tau1));
      two_gamma = at(n_max) - tail;
    }
  }
  two_gamma = std::clamp(two_gamma, lo, hi);
  out.gamma = two_gamma / 2.0;

  std::vector<std::pair<double, double>> fit_points;
  for (std::int64_t k : dyadic) {
    double r = at(k) - two_gamma;
    if (std::abs(r) <= negligible) r = 0.0;
    out.residuals.push_back(r);
    if (r != 0.0) fit_points.emplace_back(static_cast<double>(k), std::abs(r));
  }
  if (fit_points.size() >= 2) out.tau = -fit_loglog(fit_points, 2).slope;
  return out;
}

}  // namespace

double CesaroProfile::effective_tau() const { return tau ? std::min(*tau, 1.0) : 1.0; }

CesaroProfile cesaro_estimate(const Environment& env, std::int64_t n_max) {
  if (n_max < 16) throw InvalidArgument("cesaro_estimate: n_max must be >= 16");
  std::vector<std::int64_t> dyadic;
  for (std::int64_t k = 16; k <= n_max; k *= 2) dyadic.push_back(k);

  SideEstimate upper = estimate_side(env, +1, n_max, dyadic);
  SideEstimate lower = estimate_side(env, -1, n_max, dyadic);

  CesaroProfile out;
  out.residual_k = dyadic;
  out.swapped = upper.gamma < lower.gamma;
  if (out.swapped) std::swap(upper, lower);
  out.gamma1 = upper.gamma;
  out.gamma2 = lower.gamma;
  out.residuals_pos = std::move(upper.residuals);
  out.residuals_neg = std::move(lower.residuals);
  if (upper.tau && lower.tau) {
    out.tau = std::min(*upper.tau, *lower.tau);
  } else if (upper.tau) {
    out.tau = upper.tau;
  } else {
    out.tau = lower.tau;
  }
  return out;
}

OrientedEnvironment orient(const Environment& env, std::int64_t n_max) {
  CesaroProfile profile = cesaro_estimate(env, n_max);
  if (profile.swapped) return {env.reflected(), profile};
  return {env, profile};
}

}  // namespace aniso
