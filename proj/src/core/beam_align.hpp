#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "core/channel.hpp"
#include "core/cmat.hpp"

namespace soiltag {

// Received power versus Tx beam direction.
struct SpatialProfile {
  std::vector<double> angles_deg;  // strictly increasing over [0, 180]
  std::vector<double> power_db;
};

struct AlignmentResult {
  double aod_deg = 0.0;
  double aoa_deg = 0.0;
  double confidence_db = 0.0;  // profile peak-to-median ratio
};

// Minimum height over the profile median for a local maximum to count
// as a peak in the single-profile tag search.
inline constexpr double kMinPeakProminenceDb = 8.0;

// Conjugate-beamforming weights normalized to unit total power.
std::vector<cplx> beamforming_weights(const ArrayGeometry& array, double angle_deg,
                                      double freq_hz);

// Strict local maxima of a series after 3-point moving-average smoothing;
// plateaus resolve to their center sample. Returned indices are sorted by
// descending smoothed value.
std::vector<std::size_t> find_peaks(const std::vector<double>& values);

// Sweep the Tx beam over [0, 180] in scan_step_deg increments and record
// the mean received power per direction, averaged over the given
// channels (all 13 when empty; frequency diversity suppresses the
// background/tag interference term). capture_label separates noise
// streams of repeated captures (live vs reference).
SpatialProfile beam_scan_profile(const ScenarioConfig& config,
                                 const std::optional<FrequencyResponse>& tag_response,
                                 double scan_step_deg, int packets_per_angle,
                                 const std::vector<int>& channels = {},
                                 std::string_view capture_label = "scan");

// Tag direction at the transmitter. Without a reference profile this is
// the second-largest profile peak; with one it is the angle maximizing
// the with-tag minus without-tag difference.
double estimate_aod(const SpatialProfile& with_tag,
                    const std::optional<SpatialProfile>& without_tag = std::nullopt);

// Noise-subspace pseudo-spectrum P(angle) = 1 / (a^H En En^H a) over the
// grid. Snapshots are one column per observation, one row per element.
std::vector<double> music_spectrum(const CMat& snapshots, int num_sources,
                                   const ArrayGeometry& array, double freq_hz,
                                   const std::vector<double>& angle_grid);

struct AoaOptions {
  int packets = 25;
  int num_sources = 2;  // LoS + tag, for the reported spectra
  double grid_step_deg = 0.5;
  double detection_ratio = 50.0;  // residual peak vs median to accept the tag
};

struct AoaEstimate {
  double aoa_deg = 0.0;
  std::vector<double> grid_deg;
  std::vector<double> spectrum_with_tag;     // linear pseudo-power
  std::vector<double> spectrum_without_tag;
  std::vector<double> spectrum_difference;   // with-tag minus tag-free snapshots
};

// Tag direction at the receiver: fixes the Tx beam on aod_deg and
// collects CSI snapshots across packets/channels/subcarriers with and
// without the tag. The estimate is the spectrum peak present with the
// tag but absent without it, located by running MUSIC on the paired
// snapshot difference where line of sight and clutter cancel.
AoaEstimate estimate_aoa(const ScenarioConfig& config,
                         const std::optional<FrequencyResponse>& tag_response,
                         double aod_deg, const AoaOptions& options = AoaOptions{});

struct AlignOptions {
  double scan_step_deg = 1.0;
  int packets_per_angle = 5;
  std::vector<int> scan_channels;  // empty: all 13
  bool differential = true;        // compare against a tag-free capture
  AoaOptions aoa;
};

struct AlignOutput {
  AlignmentResult result;
  SpatialProfile profile_with_tag;
  SpatialProfile profile_without_tag;  // empty unless differential
  AoaEstimate aoa;
};

// Full passive alignment: beam scan for AoD, then MUSIC for AoA.
AlignOutput align_tag(const ScenarioConfig& config,
                      const std::optional<FrequencyResponse>& tag_response,
                      const AlignOptions& options = AlignOptions{});

}  // namespace soiltag
