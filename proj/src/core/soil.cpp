#include "core/soil.hpp"

#include <string>

#include "core/errors.hpp"

namespace soiltag {

double topp_permittivity(double theta) {
  check_domain(theta >= 0.0 && theta <= 1.0,
               "moisture fraction must lie in [0, 1], got " + std::to_string(theta));
  return 3.03 + 9.3 * theta + 146.0 * theta * theta - 76.6 * theta * theta * theta;
}

double vwc_to_gwc(double vwc, double bulk_density) {
  check_domain(vwc >= 0.0, "volumetric water content must be >= 0");
  check_domain(bulk_density > 0.0, "bulk density must be > 0");
  return vwc / bulk_density;
}

SoilSample SoilSample::from_theta(double theta) {
  return SoilSample{theta, topp_permittivity(theta)};
}

}  // namespace soiltag
