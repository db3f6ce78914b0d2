#include "aniso/stats.hpp"

#include <algorithm>
#include <cmath>

#include "aniso/errors.hpp"

namespace aniso {

ExponentFit fit_loglog(std::span<const std::pair<double, double>> xy, std::size_t min_points) {
  ExponentFit fit;
  for (const auto& [x, y] : xy) {
    if (x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y)) {
      fit.points.emplace_back(std::log(x), std::log(y));
    }
  }
  if (fit.points.size() < min_points || fit.points.size() < 2) {
    throw InvalidArgument("log-log fit needs at least " + std::to_string(std::max<std::size_t>(min_points, 2)) +
                          " positive points, got " + std::to_string(fit.points.size()));
  }
  const double n = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    mx += lx;
    my += ly;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (sxx == 0.0) throw InvalidArgument("log-log fit needs at least two distinct x values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [lx, ly] : fit.points) {
    const double r = ly - (fit.intercept + fit.slope * lx);
    ss_res += r * r;
  }
  // Residuals at rounding level count as an exact fit.
  if (syy == 0.0 || ss_res <= 1e-24 * std::max(1.0, syy)) {
    fit.r_squared = 1.0;
  } else {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

double ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  std::vector<double> f(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) f[i] = i > 0 && samples[i] == samples[i - 1] ? f[i - 1] : cdf(samples[i]);
  return ks_one_sample_sorted(samples, f);
}

double ks_one_sample_sorted(std::span<const double> samples, std::span<const double> cdf_at) {
  if (samples.empty()) throw InvalidArgument("ks_one_sample: empty sample");
  if (cdf_at.size() != samples.size()) throw InvalidArgument("ks_one_sample: one cdf value per sample");
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf_at[i];
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(j) / n - f));
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double normal_cdf(double x, double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("normal_cdf: variance must be positive");
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw InvalidArgument("histogram: need bins > 0 and hi > lo");
  std::vector<HistogramBin> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + width * static_cast<double>(b);
    out[b].right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double v : values) {
    auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

}  // namespace aniso
