#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace aniso {

/// Least-squares line through (log x, log y).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log x, log y) actually used
};

/// Drops points with nonpositive y (or x). Throws InvalidArgument if fewer
/// than `min_points` usable points remain.
ExponentFit fit_loglog(std::span<const std::pair<double, double>> xy, std::size_t min_points = 3);

/// sup_x |F_n(x) - cdf(x)|. Samples need not be sorted.
double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Same statistic for ascending samples with cdf_at[i] = F(sorted[i]).
double ks_one_sample_sorted(std::span<const double> sorted, std::span<const double> cdf_at);

/// sup_x |F_a(x) - F_b(x)|, exact under ties.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

double normal_cdf(double x, double variance);

double median(std::vector<double> values);

/// Half the L1 distance between two probability mass functions.
template <class Key>
double total_variation(const std::map<Key, double>& a, const std::map<Key, double>& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::uint64_t count = 0;
};

/// Equal-width bins over [lo, hi]; values outside are clamped into the edge bins.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins, double lo, double hi);

}  // namespace aniso
