#include "aniso/density.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "aniso/errors.hpp"

namespace aniso {

double DensitySpec::support_lo() const {
  return variant == DensityVariant::inverse ? t / gamma1 : t * (1.0 - 1.0 / gamma2);
}

double DensitySpec::support_hi() const {
  return variant == DensityVariant::inverse ? t / gamma2 : t * (1.0 - 1.0 / gamma1);
}

DensitySpec make_density_spec(double t, double gamma1, double gamma2, DensityVariant variant) {
  if (!(t > 0.0)) throw InvalidArgument("density: t must be positive");
  if (!(gamma2 >= 1.0) || !(gamma1 >= gamma2) || !std::isfinite(gamma1)) {
    throw InvalidArgument("density: need gamma1 >= gamma2 >= 1");
  }
  return {t, gamma1, gamma2, variant};
}

namespace {

void require_density(const DensitySpec& spec) {
  if (spec.point_mass()) {
    throw DegenerateLaw("gamma1 == gamma2: point mass at v = " + std::to_string(spec.support_lo()));
  }
}

[[noreturn]] void endpoint(double v) {
  throw Singularity("density diverges at support endpoint v = " + std::to_string(v));
}

}  // namespace

double inverse_density(const DensitySpec& spec, double v) {
  require_density(spec);
  const double lo = spec.t / spec.gamma1;
  const double hi = spec.t / spec.gamma2;
  if (v < lo || v > hi) return 0.0;
  if (v == lo || v == hi) endpoint(v);
  const double a = v * spec.gamma1 - spec.t;
  const double b = spec.t - spec.gamma2 * v;
  if (!(a > 0.0) || !(b > 0.0)) endpoint(v);
  return spec.t / (std::numbers::pi * v) / std::sqrt(a * b);
}

double complement_density(const DensitySpec& spec, double v) {
  require_density(spec);
  const double lo = spec.t * (1.0 - 1.0 / spec.gamma2);
  const double hi = spec.t * (1.0 - 1.0 / spec.gamma1);
  if (v < lo || v > hi) return 0.0;
  if (v == lo || v == hi) endpoint(v);
  const double a = (spec.gamma1 - 1.0) * spec.t - spec.gamma1 * v;
  const double b = spec.t * (1.0 - spec.gamma2) + spec.gamma2 * v;
  if (!(a > 0.0) || !(b > 0.0)) endpoint(v);
  return spec.t / (std::numbers::pi * (spec.t - v)) / std::sqrt(a * b);
}

double density(const DensitySpec& spec, double v) {
  return spec.variant == DensityVariant::inverse ? inverse_density(spec, v) : complement_density(spec, v);
}

namespace {

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  // Split into panels first so the recursion sees a smooth integrand on each.
  constexpr int panels = 16;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + h * i;
    const double x1 = i + 1 == panels ? b : a + h * (i + 1);
    const double fa = f(x0);
    const double fb = f(x1);
    const double fm = f(0.5 * (x0 + x1));
    total += adaptive_simpson(f, x0, x1, fa, fm, fb, simpson(x0, x1, fa, fm, fb), tol / panels, 40);
  }
  return total;
}

}  // namespace

namespace {

constexpr double half_pi = std::numbers::pi / 2.0;

/// f(v) dv = f(mid + r sin th) r cos th dth. The square-root factor equals
/// sqrt(gamma1 gamma2) r cos th, so the integrand is t / (pi sqrt(gamma1 gamma2) x)
/// with x = v (inverse) or t - v (complement), smooth on the closed interval.
std::function<double(double)> theta_integrand(const DensitySpec& spec) {
  const double lo = spec.support_lo();
  const double hi = spec.support_hi();
  const double mid = 0.5 * (lo + hi);
  const double radius = 0.5 * (hi - lo);
  const double scale = spec.t / (std::numbers::pi * std::sqrt(spec.gamma1 * spec.gamma2));
  const bool inverse = spec.variant == DensityVariant::inverse;
  const double t = spec.t;
  return [=](double theta) {
    const double v = mid + radius * std::sin(std::clamp(theta, -half_pi, half_pi));
    return scale / (inverse ? v : t - v);
  };
}

double theta_of(const DensitySpec& spec, double v) {
  const double lo = spec.support_lo();
  const double hi = spec.support_hi();
  if (v <= lo) return -half_pi;
  if (v >= hi) return half_pi;
  const double mid = 0.5 * (lo + hi);
  const double radius = 0.5 * (hi - lo);
  return std::asin(std::clamp((v - mid) / radius, -1.0, 1.0));
}

double mass_below(const DensitySpec& spec, double v) {
  return integrate(theta_integrand(spec), -half_pi, theta_of(spec, v), 1e-12);
}

}  // namespace

double density_cdf(const DensitySpec& spec, double v) {
  if (spec.point_mass()) return v >= spec.support_lo() ? 1.0 : 0.0;
  if (v <= spec.support_lo()) return 0.0;
  if (v >= spec.support_hi()) return 1.0;
  return std::clamp(mass_below(spec, v), 0.0, 1.0);
}

std::vector<double> density_cdf_sorted(const DensitySpec& spec, std::span<const double> sorted) {
  std::vector<double> out(sorted.size());
  if (spec.point_mass()) {
    for (std::size_t i = 0; i < sorted.size(); ++i) out[i] = density_cdf(spec, sorted[i]);
    return out;
  }
  const auto f = theta_integrand(spec);
  double theta = -half_pi;
  double mass = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] < sorted[i - 1]) throw InvalidArgument("density_cdf_sorted: points must be sorted");
    const double next = theta_of(spec, sorted[i]);
    if (next > theta) {
      const double fa = f(theta);
      const double fb = f(next);
      const double fm = f(0.5 * (theta + next));
      mass += adaptive_simpson(f, theta, next, fa, fm, fb, simpson(theta, next, fa, fm, fb), 1e-14, 40);
      theta = next;
    }
    out[i] = sorted[i] >= spec.support_hi() ? 1.0 : std::clamp(mass, 0.0, 1.0);
  }
  return out;
}

double density_total_mass(const DensitySpec& spec) {
  require_density(spec);
  return mass_below(spec, spec.support_hi());
}

std::vector<DensityRow> density_table(const DensitySpec& spec, std::size_t points) {
  require_density(spec);
  if (points < 2) throw InvalidArgument("density_table: need at least 2 points");
  const double lo = spec.support_lo();
  const double hi = spec.support_hi();
  const double mid = 0.5 * (lo + hi);
  const double radius = 0.5 * (hi - lo);
  std::vector<DensityRow> rows;
  rows.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double theta = -std::numbers::pi / 2.0 + std::numbers::pi * static_cast<double>(i) / static_cast<double>(points - 1);
    double v = i == 0 ? lo : (i + 1 == points ? hi : mid + radius * std::sin(theta));
    DensityRow row;
    row.v = v;
    if (i == 0 || i + 1 == points) {
      row.pdf = std::numeric_limits<double>::infinity();
    } else {
      try {
        row.pdf = density(spec, v);
      } catch (const Singularity&) {
        row.pdf = std::numeric_limits<double>::infinity();
      }
    }
    row.cdf = i + 1 == points ? density_total_mass(spec) : density_cdf(spec, v);
    rows.push_back(row);
  }
  return rows;
}

std::string_view to_string(DensityVariant variant) {
  return variant == DensityVariant::inverse ? "inverse" : "complement";
}

DensityVariant density_variant_from_string(std::string_view name) {
  if (name == "inverse") return DensityVariant::inverse;
  if (name == "complement") return DensityVariant::complement;
  throw InvalidArgument("unknown density variant '" + std::string(name) + "'");
}

}  // namespace aniso
