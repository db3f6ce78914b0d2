#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aniso {

/// Wiener path sampled at k * dt, k = 0..K.
struct WienerGrid {
  double dt = 1.0;
  std::vector<double> values;
  std::uint64_t seed = 0;

  std::size_t cells() const { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const { return dt * static_cast<double>(cells()); }
  /// Linear interpolation between grid points. Pre: 0 <= t <= horizon().
  double at(double t) const;
};

/// Grid-sampled A(t) = gamma1 |{s <= t : W(s) >= 0}| + gamma2 |{s <= t : W(s) < 0}|,
/// with the sign of W read at the left endpoint of each cell.
///
/// A(k dt) = dt * (gamma1 * nonneg[k] + gamma2 * (k - nonneg[k])). Keeping the
/// integer cell counts makes monotonicity of A and of A(t) - t exact in floating point.
struct TimeChange {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double dt = 1.0;
  std::vector<std::uint64_t> nonneg;  // cells with W(left) >= 0 among the first k
  std::vector<double> values;         // A(k dt)

  std::size_t cells() const { return values.empty() ? 0 : values.size() - 1; }
  double time(std::size_t k) const { return dt * static_cast<double>(k); }
  double final_value() const { return values.back(); }
  /// Slope of A on cell k: gamma1 or gamma2.
  double slope(std::size_t k) const {
    return nonneg[k + 1] > nonneg[k] ? gamma1 : gamma2;
  }
  /// A(t) - t at grid point k, computed as dt * ((gamma1 - 1) n+ + (gamma2 - 1) n-).
  double excess(std::size_t k) const;
  /// A(t) by linear interpolation.
  double evaluate(double t) const;
};

/// K = ceil(T / dt) Gaussian increments of variance dt. Pre: 0 < dt <= T.
WienerGrid simulate_wiener(double horizon, double dt, std::uint64_t seed);

/// Pre: gamma1 >= gamma2 >= 1.
TimeChange additive_functional(const WienerGrid& w, double gamma1, double gamma2);

/// t with A(t) = s. Pre: 0 <= s <= A(T).
double inverse_time_change(const TimeChange& tc, double s);

/// Y(t) = W(A^{-1}(t)) at each requested time.
std::vector<double> oscillating_bm(const WienerGrid& w, double gamma1, double gamma2,
                                   std::span<const double> sample_times);

}  // namespace aniso
