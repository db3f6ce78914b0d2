#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace aniso {

enum class DensityVariant { inverse, complement };

/// Law of A^{-1}(t) (inverse) or of t - A^{-1}(t) (complement) for
/// oscillating Brownian motion with constants gamma1 >= gamma2 >= 1.
struct DensitySpec {
  double t = 1.0;
  double gamma1 = 2.0;
  double gamma2 = 1.0;
  DensityVariant variant = DensityVariant::inverse;

  /// gamma1 == gamma2: A^{-1}(t) = t / gamma is deterministic.
  bool point_mass() const { return gamma1 == gamma2; }
  double support_lo() const;
  double support_hi() const;
};

/// Validates t > 0 and gamma1 >= gamma2 >= 1.
DensitySpec make_density_spec(double t, double gamma1, double gamma2, DensityVariant variant);

/// (t / (pi v)) / sqrt((v gamma1 - t)(t - gamma2 v)) inside (t/gamma1, t/gamma2), 0 outside.
/// Throws Singularity at an endpoint and DegenerateLaw for a point mass.
double inverse_density(const DensitySpec& spec, double v);

/// (t / (pi (t - v))) / sqrt(((gamma1 - 1) t - gamma1 v)(t (1 - gamma2) + gamma2 v))
/// inside (t (1 - 1/gamma2), t (1 - 1/gamma1)), 0 outside.
double complement_density(const DensitySpec& spec, double v);

/// Dispatches on spec.variant.
double density(const DensitySpec& spec, double v);

/// P(X <= v), integrating the density after v = mid + radius sin(theta).
/// For a point mass this is the unit step at the atom.
double density_cdf(const DensitySpec& spec, double v);

/// density_cdf at each of `sorted` (ascending), integrating only between
/// consecutive points.
std::vector<double> density_cdf_sorted(const DensitySpec& spec, std::span<const double> sorted);

/// Quadrature of the density over its whole support (1 up to quadrature error).
double density_total_mass(const DensitySpec& spec);

struct DensityRow {
  double v = 0.0;
  double pdf = 0.0;  // +inf at the two support endpoints
  double cdf = 0.0;
};

/// `points` rows spanning the closed support, spaced uniformly in theta so
/// that rows crowd toward the singular endpoints. Pre: points >= 2, not a point mass.
std::vector<DensityRow> density_table(const DensitySpec& spec, std::size_t points);

std::string_view to_string(DensityVariant variant);
DensityVariant density_variant_from_string(std::string_view name);

}  // namespace aniso
