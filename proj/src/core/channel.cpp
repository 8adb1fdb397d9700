#include "core/channel.hpp"

#include <cmath>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace soiltag {

namespace {

double hypot2(double dx, double dy) { return std::sqrt(dx * dx + dy * dy); }

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return hypot2(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

void ArrayGeometry::validate() const {
  check_domain(num_elements >= 1, "array needs at least one element");
  check_domain(spacing_wavelengths > 0.0, "element spacing must be > 0");
}

double channel_center_hz(int channel_index) {
  check_domain(channel_index >= 1 && channel_index <= kNumChannels,
               "channel index must be in 1..13");
  return kChannel1CenterHz + (channel_index - 1) * kChannelStepHz;
}

std::vector<double> subcarrier_freqs(int channel_index) {
  const double center = channel_center_hz(channel_index);
  std::vector<double> freqs(kSubcarriersPerChannel);
  for (int i = 0; i < kSubcarriersPerChannel; ++i) {
    // Half-integer offsets keep the grid symmetric about the center.
    freqs[i] = center + (i - (kSubcarriersPerChannel - 1) / 2.0) * kSubcarrierSpacingHz;
  }
  return freqs;
}

std::vector<cplx> steering_vector(const ArrayGeometry& array, double angle_deg,
                                  double freq_hz) {
  array.validate();
  check_domain(angle_deg >= 0.0 && angle_deg <= 180.0, "angle must be in [0, 180] degrees");
  check_domain(freq_hz > 0.0, "frequency must be > 0");
  const double cos_a = std::cos(angle_deg * kPi / 180.0);
  // spacing is quoted at the reference carrier; rescale to this frequency.
  const double phase_step =
      -2.0 * kPi * array.spacing_wavelengths * (freq_hz / kArrayReferenceHz) * cos_a;
  std::vector<cplx> a(array.num_elements);
  for (int n = 0; n < array.num_elements; ++n) {
    a[n] = std::polar(1.0, phase_step * n);
  }
  return a;
}

CsiProfile synthesize_csi(const std::vector<Path>& paths,
                          const std::optional<FrequencyResponse>& tag_response,
                          const std::vector<cplx>& tx_weights,
                          const ArrayGeometry& tx_array, const ArrayGeometry& rx_array,
                          int channel_index, double noise_power, std::uint64_t rng_seed) {
  tx_array.validate();
  rx_array.validate();
  check_shape(tx_weights.size() == static_cast<std::size_t>(tx_array.num_elements),
              "tx weight vector length must match the Tx element count");
  check_domain(noise_power >= 0.0, "noise power must be >= 0");
  int tag_paths = 0;
  for (const Path& p : paths) {
    check_domain(p.aod_deg >= 0.0 && p.aod_deg <= 180.0 && p.aoa_deg >= 0.0 &&
                     p.aoa_deg <= 180.0,
                 "path angles must be in [0, 180] degrees");
    check_domain(std::abs(p.gain) > 0.0, "path gain must be non-zero");
    if (p.kind == PathKind::TagReflection) ++tag_paths;
  }
  check_domain(tag_paths <= 1, "at most one tag reflection path per tag");

  CsiProfile profile;
  profile.channel_index = channel_index;
  profile.subcarrier_freqs_hz = subcarrier_freqs(channel_index);
  profile.num_rx = rx_array.num_elements;
  profile.h.assign(profile.subcarrier_freqs_hz.size() * rx_array.num_elements, cplx{});

  // Steering phases evaluated with incremental phasor products; this
  // loop dominates every scan and dataset run.
  for (std::size_t sc = 0; sc < profile.subcarrier_freqs_hz.size(); ++sc) {
    const double f = profile.subcarrier_freqs_hz[sc];
    const double fscale = f / kArrayReferenceHz;
    for (const Path& p : paths) {
      double g_mag = 1.0;
      if (p.kind == PathKind::TagReflection && tag_response.has_value()) {
        g_mag = std::pow(10.0, tag_response->gain_at(f) / 20.0);
      }
      // a_tx(aod)^H w: conj of exp(-j*step*n) walks the +step direction.
      const double tx_step = 2.0 * kPi * tx_array.spacing_wavelengths * fscale *
                             std::cos(p.aod_deg * kPi / 180.0);
      const cplx tx_rot = std::polar(1.0, tx_step);
      cplx beam{};
      cplx tx_phase{1.0, 0.0};
      for (int n = 0; n < tx_array.num_elements; ++n) {
        beam += tx_phase * tx_weights[n];
        tx_phase *= tx_rot;
      }
      const cplx contrib =
          p.gain * g_mag * beam * std::polar(1.0, -2.0 * kPi * f * p.delay_s);
      const double rx_step = -2.0 * kPi * rx_array.spacing_wavelengths * fscale *
                             std::cos(p.aoa_deg * kPi / 180.0);
      const cplx rx_rot = std::polar(1.0, rx_step);
      cplx rx_phase{1.0, 0.0};
      for (int m = 0; m < rx_array.num_elements; ++m) {
        profile.at(sc, m) += rx_phase * contrib;
        rx_phase *= rx_rot;
      }
    }
  }

  if (noise_power > 0.0) {
    Rng rng(rng_seed);
    for (std::size_t sc = 0; sc < profile.subcarrier_freqs_hz.size(); ++sc) {
      for (int m = 0; m < rx_array.num_elements; ++m) {
        profile.at(sc, m) += rng.complex_normal(noise_power);
      }
    }
  }
  return profile;
}

std::vector<cplx> combine_rx(const CsiProfile& profile, const std::vector<cplx>& rx_weights) {
  check_shape(rx_weights.size() == static_cast<std::size_t>(profile.num_rx),
              "rx weight vector length must match the Rx element count");
  std::vector<cplx> y(profile.subcarrier_freqs_hz.size());
  for (std::size_t sc = 0; sc < y.size(); ++sc) {
    cplx acc{};
    for (int m = 0; m < profile.num_rx; ++m) {
      acc += std::conj(rx_weights[m]) * profile.at(sc, m);
    }
    y[sc] = acc;
  }
  return y;
}

EnvironmentPreset environment_preset(const std::string& name) {
  if (name == "chamber") return {0, 0.0};
  if (name == "open_room") return {2, 0.0};
  if (name == "courtyard") return {3, 0.0};
  if (name == "farmland") return {3, 0.0};
  if (name == "office") return {8, 0.0};
  if (name == "motion") return {4, 8.0};
  throw ConfigError("unknown environment preset: " + name);
}

double angle_from_axis(const std::array<double, 2>& origin, double axis_deg,
                       const std::array<double, 2>& target) {
  const double dx = target[0] - origin[0];
  const double dy = target[1] - origin[1];
  const double d = hypot2(dx, dy);
  check_domain(d > 0.0, "coincident positions give no direction");
  const double ux = std::cos(axis_deg * kPi / 180.0);
  const double uy = std::sin(axis_deg * kPi / 180.0);
  double c = (dx * ux + dy * uy) / d;
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

Scene make_scenario(const ScenarioConfig& config) {
  config.tx_array.validate();
  config.rx_array.validate();
  check_domain(distance(config.tx_pos, config.rx_pos) > 0.0, "Tx and Rx positions coincide");
  if (config.include_tag) {
    check_domain(distance(config.tx_pos, config.tag_pos) > 0.0, "tag coincides with Tx");
    check_domain(distance(config.rx_pos, config.tag_pos) > 0.0, "tag coincides with Rx");
  }

  const EnvironmentPreset preset = environment_preset(config.environment);
  const int clutter_count =
      config.clutter_override >= 0 ? config.clutter_override : preset.clutter_count;

  // Free-space amplitude reference: lambda/(4*pi) per hop at the band carrier.
  const double hop_ref = kSpeedOfLight / kArrayReferenceHz / (4.0 * kPi);

  Scene scene;
  const double d_los = distance(config.tx_pos, config.rx_pos);
  Path los;
  los.kind = PathKind::LoS;
  los.aod_deg = angle_from_axis(config.tx_pos, config.tx_axis_deg, config.rx_pos);
  los.aoa_deg = angle_from_axis(config.rx_pos, config.rx_axis_deg, config.tx_pos);
  los.gain = hop_ref / d_los;
  los.delay_s = d_los / kSpeedOfLight;
  scene.paths.push_back(los);

  if (config.include_tag) {
    const double d_tx_tag = distance(config.tx_pos, config.tag_pos);
    const double d_tag_rx = distance(config.tag_pos, config.rx_pos);
    const double g_amp = std::pow(10.0, config.tag_gain_dbi / 20.0);
    Path tag;
    tag.kind = PathKind::TagReflection;
    tag.aod_deg = angle_from_axis(config.tx_pos, config.tx_axis_deg, config.tag_pos);
    tag.aoa_deg = angle_from_axis(config.rx_pos, config.rx_axis_deg, config.tag_pos);
    // The tag receives and re-radiates through its own antennas, so the
    // antenna gain and the hop reference both apply twice.
    tag.gain = g_amp * g_amp * hop_ref * hop_ref / (d_tx_tag * d_tag_rx);
    tag.delay_s = (d_tx_tag + d_tag_rx) / kSpeedOfLight;
    scene.paths.push_back(tag);
  }

  const double los_power = std::norm(los.gain);
  Rng rng(derive_seed(config.seed, "scenario"));
  for (int k = 0; k < clutter_count; ++k) {
    Path c;
    c.kind = PathKind::Clutter;
    c.aod_deg = rng.uniform(0.0, 180.0);
    c.aoa_deg = rng.uniform(0.0, 180.0);
    do {
      c.gain = rng.complex_normal(los_power / 10.0);
    } while (std::abs(c.gain) == 0.0);
    c.delay_s = los.delay_s + rng.uniform(0.0, 200e-9);
    scene.paths.push_back(c);
  }

  const double snr_db = config.snr_db - preset.snr_penalty_db;
  scene.noise_power = los_power / std::pow(10.0, snr_db / 10.0);
  return scene;
}

}  // namespace soiltag
