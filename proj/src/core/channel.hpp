#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/cmat.hpp"
#include "core/resonator.hpp"

namespace soiltag {

// Uniform linear array; spacing is in wavelengths at kArrayReferenceHz.
struct ArrayGeometry {
  int num_elements = 1;
  double spacing_wavelengths = 0.5;

  void validate() const;
};

enum class PathKind { LoS, TagReflection, Clutter };

// One propagation path between the arrays. Angles are measured from the
// array axis, so 90 degrees is broadside.
struct Path {
  PathKind kind = PathKind::LoS;
  double aod_deg = 90.0;
  double aoa_deg = 90.0;
  cplx gain;        // linear amplitude
  double delay_s = 0.0;
};

// Complex CSI for one 20 MHz channel: per subcarrier, per Rx element.
struct CsiProfile {
  int channel_index = 1;  // 1..13
  std::vector<double> subcarrier_freqs_hz;
  int num_rx = 1;
  std::vector<cplx> h;  // [subcarrier * num_rx + element]

  cplx& at(std::size_t sc, std::size_t elem) { return h[sc * num_rx + elem]; }
  const cplx& at(std::size_t sc, std::size_t elem) const { return h[sc * num_rx + elem]; }
};

double channel_center_hz(int channel_index);
std::vector<double> subcarrier_freqs(int channel_index);

// Per-element plane-wave phases exp(-j*2*pi*spacing*(f/f_ref)*n*cos(angle)).
std::vector<cplx> steering_vector(const ArrayGeometry& array, double angle_deg,
                                  double freq_hz);

// Sum the per-path contributions onto every (subcarrier, Rx element) pair
// and add seeded complex Gaussian noise of the given per-subcarrier power.
// The TagReflection path is shaped by tag_response (magnitude, linear in
// dB between grid points); passing nullopt leaves the tag path unfiltered.
CsiProfile synthesize_csi(const std::vector<Path>& paths,
                          const std::optional<FrequencyResponse>& tag_response,
                          const std::vector<cplx>& tx_weights,
                          const ArrayGeometry& tx_array, const ArrayGeometry& rx_array,
                          int channel_index, double noise_power, std::uint64_t rng_seed);

// Rx combining: y[sc] = w^H h[sc].
std::vector<cplx> combine_rx(const CsiProfile& profile, const std::vector<cplx>& rx_weights);

// Multipath presets. Clutter count and an SNR penalty emulate the
// measured environments (motion is the elevated-noise preset).
struct EnvironmentPreset {
  int clutter_count = 0;
  double snr_penalty_db = 0.0;
};
EnvironmentPreset environment_preset(const std::string& name);

// Plan-view deployment of the transceiver pair and the tag.
struct ScenarioConfig {
  std::array<double, 2> tx_pos{0.0, 0.0};
  std::array<double, 2> rx_pos{4.0, 0.0};
  std::array<double, 2> tag_pos{0.9395, 1.7670};
  double tx_axis_deg = -40.0;  // array line direction in world coordinates
  double rx_axis_deg = 90.0;
  ArrayGeometry tx_array{8, 0.5};
  ArrayGeometry rx_array{4, 0.5};
  std::string environment = "open_room";
  int clutter_override = -1;  // >= 0 replaces the preset count
  double snr_db = 25.0;       // relative to single-antenna LoS power
  double tag_gain_dbi = 16.8; // patch-array gain, applied per hop
  bool include_tag = true;
  std::uint64_t seed = 1;
};

struct Scene {
  std::vector<Path> paths;
  double noise_power = 0.0;  // per subcarrier, per element
};

// Geometric path synthesis: LoS gain follows the free-space 1/d law,
// the tag reflection the 1/(d_tx * d_rx) product law with the antenna
// gain on both hops, and clutter is drawn from the scenario seed at
// 10 dB average attenuation below LoS.
Scene make_scenario(const ScenarioConfig& config);

// Angle of `target` seen from an array at `origin` whose axis points
// along axis_deg; result in [0, 180].
double angle_from_axis(const std::array<double, 2>& origin, double axis_deg,
                       const std::array<double, 2>& target);

}  // namespace soiltag
