#include "aniso/timechange.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aniso/errors.hpp"
#include "aniso/rng.hpp"

namespace aniso {

double WienerGrid::at(double t) const {
  if (values.empty()) throw InvalidArgument("empty Wiener grid");
  if (!(t >= 0.0) || t > horizon() * (1.0 + 1e-12)) {
    throw OutOfRange("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon()) + "]");
  }
  const double pos = t / dt;
  const auto k = std::min(static_cast<std::size_t>(pos), cells() == 0 ? 0 : cells() - 1);
  if (cells() == 0) return values[0];
  const double frac = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
  return values[k] + frac * (values[k + 1] - values[k]);
}

double TimeChange::excess(std::size_t k) const {
  const auto pos = static_cast<double>(nonneg[k]);
  const auto neg = static_cast<double>(k - nonneg[k]);
  return dt * ((gamma1 - 1.0) * pos + (gamma2 - 1.0) * neg);
}

double TimeChange::evaluate(double t) const {
  const double horizon = time(cells());
  if (!(t >= 0.0) || t > horizon * (1.0 + 1e-12)) {
    throw OutOfRange("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon) + "]");
  }
  if (cells() == 0) return 0.0;
  const auto k = std::min(static_cast<std::size_t>(t / dt), cells() - 1);
  return values[k] + slope(k) * std::max(0.0, t - time(k));
}

WienerGrid simulate_wiener(double horizon, double dt, std::uint64_t seed) {
  if (!(dt > 0.0)) throw InvalidArgument("simulate_wiener: dt must be positive");
  if (!(horizon >= dt)) throw InvalidArgument("simulate_wiener: need dt <= T");
  // Guard against T/dt landing a rounding error above an integer.
  const auto cells = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  WienerGrid w;
  w.dt = dt;
  w.seed = seed;
  w.values.resize(cells + 1);
  Rng rng(seed);
  const double sd = std::sqrt(dt);
  double x = 0.0;
  w.values[0] = 0.0;
  for (std::size_t k = 1; k <= cells; ++k) {
    x += sd * rng.normal();
    w.values[k] = x;
  }
  return w;
}

TimeChange additive_functional(const WienerGrid& w, double gamma1, double gamma2) {
  if (!(gamma2 >= 1.0) || !(gamma1 >= gamma2)) {
    throw InvalidArgument("additive_functional: need gamma1 >= gamma2 >= 1");
  }
  TimeChange tc;
  tc.gamma1 = gamma1;
  tc.gamma2 = gamma2;
  tc.dt = w.dt;
  const std::size_t cells = w.cells();
  tc.nonneg.resize(cells + 1);
  tc.values.resize(cells + 1);
  std::uint64_t pos = 0;
  tc.nonneg[0] = 0;
  tc.values[0] = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    if (w.values[k] >= 0.0) ++pos;
    tc.nonneg[k + 1] = pos;
    const auto neg = static_cast<double>(k + 1 - pos);
    tc.values[k + 1] = w.dt * (gamma1 * static_cast<double>(pos) + gamma2 * neg);
  }
  return tc;
}

double inverse_time_change(const TimeChange& tc, double s) {
  if (tc.values.empty()) throw InvalidArgument("empty time change");
  if (!(s >= 0.0) || s > tc.final_value()) {
    throw OutOfRange("inverse_time_change: " + std::to_string(s) + " outside [0, A(T)] = [0, " +
                     std::to_string(tc.final_value()) + "]");
  }
  const auto it = std::lower_bound(tc.values.begin(), tc.values.end(), s);
  const auto idx = static_cast<std::size_t>(it - tc.values.begin());
  if (idx == 0) return 0.0;
  const std::size_t k = idx - 1;
  const double t = tc.time(k) + (s - tc.values[k]) / tc.slope(k);
  return std::clamp(t, tc.time(k), tc.time(k + 1));
}

std::vector<double> oscillating_bm(const WienerGrid& w, double gamma1, double gamma2,
                                   std::span<const double> sample_times) {
  const TimeChange tc = additive_functional(w, gamma1, gamma2);
  std::vector<double> out;
  out.reserve(sample_times.size());
  for (double t : sample_times) out.push_back(w.at(inverse_time_change(tc, t)));
  return out;
}

}  // namespace aniso
