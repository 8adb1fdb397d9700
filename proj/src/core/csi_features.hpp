#pragma once

#include <vector>

#include "core/channel.hpp"

namespace soiltag {

// Stitched relative-gain feature across the selected subcarriers of all
// captured channels, in ascending frequency order.
struct FeatureVector {
  std::vector<double> freqs_hz;
  std::vector<double> gain_db;
};

// 20*log10(a / a_ref); a == 0 clips to the -80 dB floor.
double filter_gain(double a, double a_ref);

// Per-channel combined amplitudes of one capture.
struct AmplitudeCapture {
  int channel_index = 1;
  std::vector<double> freqs_hz;
  std::vector<double> amplitude;
};

// |w^H h| per subcarrier for one channel.
AmplitudeCapture amplitude_capture(const CsiProfile& profile,
                                   const std::vector<cplx>& rx_weights);

// Core stitching: take the centered block of subcarriers_per_channel
// entries from every channel, form the live/reference gain ratio per
// subcarrier, concatenate in channel order and drop duplicate
// frequencies (first occurrence wins).
FeatureVector stitch_amplitudes(const std::vector<AmplitudeCapture>& live,
                                const std::vector<AmplitudeCapture>& reference,
                                int subcarriers_per_channel);

// Single-capture convenience over raw CSI profiles.
FeatureVector stitch_channels(const std::vector<CsiProfile>& live,
                              const std::vector<CsiProfile>& reference,
                              const std::vector<cplx>& rx_weights,
                              int subcarriers_per_channel);

}  // namespace soiltag
