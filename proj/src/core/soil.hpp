#pragma once

namespace soiltag {

// Default loam bulk density used when a config omits it (g/cm^3).
inline constexpr double kDefaultBulkDensity = 1.3;

// A soil state: gravimetric water content (fraction of dry-soil weight)
// together with the relative permittivity it implies.
struct SoilSample {
  double theta_gwc = 0.0;  // fraction in [0, 1]
  double epsilon = 1.0;    // relative permittivity, >= 1

  static SoilSample from_theta(double theta);
};

// Empirical cubic mapping moisture fraction -> relative permittivity:
// 3.03 + 9.3*theta + 146*theta^2 - 76.6*theta^3.
// The fit covers soil mixtures only, so theta outside [0, 1] is
// rejected rather than extrapolated.
double topp_permittivity(double theta);

// Volumetric water content -> gravimetric, dividing by bulk density
// (g/cm^3).
double vwc_to_gwc(double vwc, double bulk_density);

}  // namespace soiltag
