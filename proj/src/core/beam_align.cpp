#include "core/beam_align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace soiltag {

namespace {

std::vector<double> smooth3(const std::vector<double>& v) {
  if (v.size() < 3) return v;
  std::vector<double> out(v.size());
  out.front() = (v[0] + v[1]) / 2.0;
  out.back() = (v[v.size() - 2] + v[v.size() - 1]) / 2.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    out[i] = (v[i - 1] + v[i] + v[i + 1]) / 3.0;
  }
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> angle_grid_deg(double step_deg) {
  std::vector<double> grid;
  for (double a = 0.0; a <= 180.0 + 1e-9; a += step_deg) {
    grid.push_back(std::min(a, 180.0));
  }
  return grid;
}

}  // namespace

std::vector<cplx> beamforming_weights(const ArrayGeometry& array, double angle_deg,
                                      double freq_hz) {
  // Matched to the steering vector under the a^H w transmit convention,
  // so each element's radiated phase conjugates its propagation phase.
  std::vector<cplx> w = steering_vector(array, angle_deg, freq_hz);
  const double scale = 1.0 / std::sqrt(static_cast<double>(array.num_elements));
  for (cplx& x : w) x *= scale;
  return w;
}

std::vector<std::size_t> find_peaks(const std::vector<double>& values) {
  const std::vector<double> s = smooth3(values);
  std::vector<std::size_t> peaks;
  std::size_t i = 1;
  while (i + 1 < s.size()) {
    if (s[i] <= s[i - 1]) {
      ++i;
      continue;
    }
    // Rising edge at i; scan any plateau to its end.
    std::size_t j = i;
    while (j + 1 < s.size() && s[j + 1] == s[j]) ++j;
    if (j + 1 < s.size() && s[j + 1] < s[j]) {
      peaks.push_back((i + j) / 2);  // plateau center
    }
    i = j + 1;
  }
  std::sort(peaks.begin(), peaks.end(),
            [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return peaks;
}

SpatialProfile beam_scan_profile(const ScenarioConfig& config,
                                 const std::optional<FrequencyResponse>& tag_response,
                                 double scan_step_deg, int packets_per_angle,
                                 const std::vector<int>& channels,
                                 std::string_view capture_label) {
  check_domain(scan_step_deg > 0.0, "scan step must be > 0");
  const double ratio = 180.0 / scan_step_deg;
  check_domain(std::abs(ratio - std::round(ratio)) < 1e-9, "scan step must divide 180");
  check_domain(packets_per_angle >= 1, "need at least one packet per angle");
  std::vector<int> scan_channels = channels;
  if (scan_channels.empty()) {
    for (int ch = 1; ch <= kNumChannels; ++ch) scan_channels.push_back(ch);
  }

  const Scene scene = make_scenario(config);
  const std::uint64_t scan_seed = derive_seed(config.seed, capture_label);

  SpatialProfile profile;
  profile.angles_deg = angle_grid_deg(scan_step_deg);
  profile.power_db.reserve(profile.angles_deg.size());

  for (std::size_t ai = 0; ai < profile.angles_deg.size(); ++ai) {
    const double angle = profile.angles_deg[ai];
    const std::uint64_t angle_seed = derive_seed(scan_seed, static_cast<std::uint64_t>(ai));
    double power_sum = 0.0;
    std::size_t samples = 0;
    for (int pkt = 0; pkt < packets_per_angle; ++pkt) {
      const std::uint64_t pkt_seed = derive_seed(angle_seed, static_cast<std::uint64_t>(pkt));
      for (int ch : scan_channels) {
        const std::vector<cplx> w =
            beamforming_weights(config.tx_array, angle, channel_center_hz(ch));
        const CsiProfile csi = synthesize_csi(
            scene.paths, tag_response, w, config.tx_array, config.rx_array, ch,
            scene.noise_power, derive_seed(pkt_seed, static_cast<std::uint64_t>(ch)));
        for (const cplx& h : csi.h) {
          power_sum += std::norm(h);
          ++samples;
        }
      }
    }
    profile.power_db.push_back(10.0 * std::log10(power_sum / static_cast<double>(samples)));
  }
  return profile;
}

double estimate_aod(const SpatialProfile& with_tag,
                    const std::optional<SpatialProfile>& without_tag) {
  check_domain(with_tag.angles_deg.size() >= 3, "profile too short");
  if (without_tag.has_value()) {
    check_shape(without_tag->angles_deg == with_tag.angles_deg,
                "profiles must share the angle grid");
    // Linear power difference: the tag's added power peaks at its true
    // direction, while a dB difference would skew toward reference nulls.
    const std::vector<double> live = smooth3(with_tag.power_db);
    const std::vector<double> ref = smooth3(without_tag->power_db);
    std::size_t best = 0;
    double best_diff = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < live.size(); ++i) {
      const double diff = std::pow(10.0, live[i] / 10.0) - std::pow(10.0, ref[i] / 10.0);
      if (diff > best_diff) {
        best_diff = diff;
        best = i;
      }
    }
    return with_tag.angles_deg[best];
  }
  // Local maxima buried in the sidelobe/noise floor do not count as
  // peaks; the tag must stand clear of the profile median.
  const std::vector<double> smoothed = smooth3(with_tag.power_db);
  const double floor_db = median_of(smoothed) + kMinPeakProminenceDb;
  std::vector<std::size_t> peaks;
  for (std::size_t idx : find_peaks(with_tag.power_db)) {
    if (smoothed[idx] >= floor_db) peaks.push_back(idx);
  }
  if (peaks.size() < 2) {
    throw InfeasibleError("tag not detected: profile has fewer than two peaks");
  }
  return with_tag.angles_deg[peaks[1]];
}

std::vector<double> music_spectrum(const CMat& snapshots, int num_sources,
                                   const ArrayGeometry& array, double freq_hz,
                                   const std::vector<double>& angle_grid) {
  array.validate();
  const std::size_t m = snapshots.rows;
  const std::size_t t = snapshots.cols;
  check_shape(m == static_cast<std::size_t>(array.num_elements),
              "snapshot rows must match the element count");
  check_domain(num_sources >= 1, "need at least one source");
  check_domain(num_sources < array.num_elements,
               "source count must be below the element count");
  check_domain(t >= static_cast<std::size_t>(num_sources),
               "need at least as many snapshots as sources");

  // Sample spatial covariance.
  CMat r(m, m);
  for (std::size_t col = 0; col < t; ++col) {
    for (std::size_t i = 0; i < m; ++i) {
      const cplx xi = snapshots.at(i, col);
      for (std::size_t j = 0; j < m; ++j) {
        r.at(i, j) += xi * std::conj(snapshots.at(j, col));
      }
    }
  }
  for (cplx& z : r.data) z /= static_cast<double>(t);

  const EigResult eig = eig_hermitian(r);
  const double lam_max = eig.values.back();
  int rank = 0;
  for (double lam : eig.values) {
    if (lam > lam_max * 1e-12) ++rank;
  }
  if (rank < num_sources) {
    throw InfeasibleError("degenerate noise subspace: covariance rank " +
                          std::to_string(rank) + " below source count " +
                          std::to_string(num_sources));
  }

  const std::size_t noise_dim = m - static_cast<std::size_t>(num_sources);
  std::vector<double> spectrum;
  spectrum.reserve(angle_grid.size());
  for (double angle : angle_grid) {
    const std::vector<cplx> a = steering_vector(array, angle, freq_hz);
    double denom = 0.0;
    for (std::size_t k = 0; k < noise_dim; ++k) {
      cplx proj{};
      for (std::size_t i = 0; i < m; ++i) {
        proj += std::conj(a[i]) * eig.vectors.at(i, k);
      }
      denom += std::norm(proj);
    }
    spectrum.push_back(1.0 / std::max(denom, 1e-300));
  }
  return spectrum;
}

namespace {

// Paired CSI snapshots across packets, channels and subcarriers with the
// Tx beam fixed: the with-tag capture, the tag-free capture, and their
// difference in which every shared path cancels.
struct SnapshotSet {
  CMat with_tag;
  CMat without_tag;
  CMat difference;
};

SnapshotSet collect_snapshots(const ScenarioConfig& config,
                              const std::optional<FrequencyResponse>& tag_response,
                              double aod_deg, int packets) {
  ScenarioConfig no_tag = config;
  no_tag.include_tag = false;
  const Scene scene_with = make_scenario(config);
  const Scene scene_without = make_scenario(no_tag);

  const std::uint64_t seed_live = derive_seed(config.seed, "aoa-live");
  const std::uint64_t seed_ref = derive_seed(config.seed, "aoa-ref");
  const std::size_t cols = static_cast<std::size_t>(packets) * kNumChannels *
                           kSubcarriersPerChannel;
  const std::size_t m = static_cast<std::size_t>(config.rx_array.num_elements);
  SnapshotSet set{CMat(m, cols), CMat(m, cols), CMat(m, cols)};

  std::size_t col = 0;
  for (int pkt = 0; pkt < packets; ++pkt) {
    const std::uint64_t pkt_live = derive_seed(seed_live, static_cast<std::uint64_t>(pkt));
    const std::uint64_t pkt_ref = derive_seed(seed_ref, static_cast<std::uint64_t>(pkt));
    for (int ch = 1; ch <= kNumChannels; ++ch) {
      const std::vector<cplx> w =
          beamforming_weights(config.tx_array, aod_deg, channel_center_hz(ch));
      const CsiProfile live = synthesize_csi(
          scene_with.paths, tag_response, w, config.tx_array, config.rx_array, ch,
          scene_with.noise_power, derive_seed(pkt_live, static_cast<std::uint64_t>(ch)));
      const CsiProfile ref = synthesize_csi(
          scene_without.paths, std::nullopt, w, config.tx_array, config.rx_array, ch,
          scene_without.noise_power, derive_seed(pkt_ref, static_cast<std::uint64_t>(ch)));
      for (int sc = 0; sc < kSubcarriersPerChannel; ++sc) {
        for (std::size_t mel = 0; mel < m; ++mel) {
          set.with_tag.at(mel, col) = live.at(sc, mel);
          set.without_tag.at(mel, col) = ref.at(sc, mel);
          set.difference.at(mel, col) = live.at(sc, mel) - ref.at(sc, mel);
        }
        ++col;
      }
    }
  }
  return set;
}

}  // namespace

AoaEstimate estimate_aoa(const ScenarioConfig& config,
                         const std::optional<FrequencyResponse>& tag_response,
                         double aod_deg, const AoaOptions& options) {
  check_domain(aod_deg >= 0.0 && aod_deg <= 180.0, "AoD must be in [0, 180]");
  check_domain(options.packets >= 1, "need at least one packet");

  const SnapshotSet snaps = collect_snapshots(config, tag_response, aod_deg, options.packets);

  AoaEstimate est;
  est.grid_deg = angle_grid_deg(options.grid_step_deg);
  est.spectrum_with_tag = music_spectrum(snaps.with_tag, options.num_sources,
                                         config.rx_array, kArrayReferenceHz, est.grid_deg);
  est.spectrum_without_tag = music_spectrum(snaps.without_tag, options.num_sources,
                                            config.rx_array, kArrayReferenceHz, est.grid_deg);
  est.spectrum_difference =
      music_spectrum(snaps.difference, 1, config.rx_array, kArrayReferenceHz, est.grid_deg);

  // In the residual only the tag path survives; a flat residual spectrum
  // means the two captures differ by nothing but noise.
  std::size_t best = 0;
  for (std::size_t i = 1; i < est.spectrum_difference.size(); ++i) {
    if (est.spectrum_difference[i] > est.spectrum_difference[best]) best = i;
  }
  const double ratio =
      est.spectrum_difference[best] / std::max(median_of(est.spectrum_difference), 1e-300);
  if (ratio < options.detection_ratio) {
    throw InfeasibleError("tag not resolved: no spectrum peak distinguishes the tag");
  }
  est.aoa_deg = est.grid_deg[best];
  return est;
}

AlignOutput align_tag(const ScenarioConfig& config,
                      const std::optional<FrequencyResponse>& tag_response,
                      const AlignOptions& options) {
  AlignOutput out;
  out.profile_with_tag =
      beam_scan_profile(config, tag_response, options.scan_step_deg,
                        options.packets_per_angle, options.scan_channels, "scan-live");
  if (options.differential) {
    ScenarioConfig no_tag = config;
    no_tag.include_tag = false;
    out.profile_without_tag =
        beam_scan_profile(no_tag, std::nullopt, options.scan_step_deg,
                          options.packets_per_angle, options.scan_channels, "scan-ref");
    out.result.aod_deg = estimate_aod(out.profile_with_tag, out.profile_without_tag);
  } else {
    out.result.aod_deg = estimate_aod(out.profile_with_tag);
  }

  out.aoa = estimate_aoa(config, tag_response, out.result.aod_deg, options.aoa);
  out.result.aoa_deg = out.aoa.aoa_deg;

  // Confidence: level at the chosen direction over the median level. In
  // differential mode this is read off the difference profile, where the
  // tag is the only structure left.
  std::vector<double> series = smooth3(out.profile_with_tag.power_db);
  if (options.differential) {
    const std::vector<double> ref = smooth3(out.profile_without_tag.power_db);
    for (std::size_t i = 0; i < series.size(); ++i) series[i] -= ref[i];
  }
  const auto it = std::lower_bound(out.profile_with_tag.angles_deg.begin(),
                                   out.profile_with_tag.angles_deg.end(),
                                   out.result.aod_deg - 1e-9);
  const std::size_t idx = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(it - out.profile_with_tag.angles_deg.begin(),
                               out.profile_with_tag.angles_deg.size() - 1));
  out.result.confidence_db = series[idx] - median_of(series);
  return out;
}

}  // namespace soiltag
