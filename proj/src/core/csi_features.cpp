#include "core/csi_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace soiltag {

double filter_gain(double a, double a_ref) {
  check_domain(a_ref > 0.0, "reference amplitude must be > 0");
  check_domain(a >= 0.0, "amplitude must be >= 0");
  if (a == 0.0) return kGainFloorDb;
  return std::max(20.0 * std::log10(a / a_ref), kGainFloorDb);
}

AmplitudeCapture amplitude_capture(const CsiProfile& profile,
                                   const std::vector<cplx>& rx_weights) {
  AmplitudeCapture cap;
  cap.channel_index = profile.channel_index;
  cap.freqs_hz = profile.subcarrier_freqs_hz;
  const std::vector<cplx> y = combine_rx(profile, rx_weights);
  cap.amplitude.reserve(y.size());
  for (const cplx& v : y) cap.amplitude.push_back(std::abs(v));
  return cap;
}

FeatureVector stitch_amplitudes(const std::vector<AmplitudeCapture>& live,
                                const std::vector<AmplitudeCapture>& reference,
                                int subcarriers_per_channel) {
  check_shape(!live.empty(), "no channels captured");
  check_shape(live.size() == reference.size(),
              "live and reference captures must cover the same channels");
  check_domain(subcarriers_per_channel >= 1 &&
                   subcarriers_per_channel <= kSubcarriersPerChannel,
               "subcarriers per channel must be in 1..64");

  std::vector<std::size_t> order(live.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return live[a].channel_index < live[b].channel_index;
  });

  FeatureVector fv;
  for (std::size_t oi : order) {
    const AmplitudeCapture& lv = live[oi];
    const AmplitudeCapture* rf = nullptr;
    for (const AmplitudeCapture& cand : reference) {
      if (cand.channel_index == lv.channel_index) {
        rf = &cand;
        break;
      }
    }
    check_shape(rf != nullptr, "reference capture missing channel " +
                                   std::to_string(lv.channel_index));
    check_shape(rf->freqs_hz == lv.freqs_hz,
                "live and reference subcarrier grids differ on channel " +
                    std::to_string(lv.channel_index));
    check_shape(lv.amplitude.size() == lv.freqs_hz.size() &&
                    rf->amplitude.size() == rf->freqs_hz.size(),
                "amplitude length mismatch");
    const std::size_t n = lv.freqs_hz.size();
    check_shape(n >= static_cast<std::size_t>(subcarriers_per_channel),
                "capture narrower than the requested block");

    const std::size_t start = (n - subcarriers_per_channel) / 2;  // centered block
    for (std::size_t k = start; k < start + subcarriers_per_channel; ++k) {
      const double f = lv.freqs_hz[k];
      if (!fv.freqs_hz.empty() && f <= fv.freqs_hz.back()) {
        continue;  // overlapping subcarrier already covered by a lower channel
      }
      fv.freqs_hz.push_back(f);
      fv.gain_db.push_back(filter_gain(lv.amplitude[k], rf->amplitude[k]));
    }
  }
  return fv;
}

FeatureVector stitch_channels(const std::vector<CsiProfile>& live,
                              const std::vector<CsiProfile>& reference,
                              const std::vector<cplx>& rx_weights,
                              int subcarriers_per_channel) {
  std::vector<AmplitudeCapture> lv;
  std::vector<AmplitudeCapture> rf;
  lv.reserve(live.size());
  rf.reserve(reference.size());
  for (const CsiProfile& p : live) lv.push_back(amplitude_capture(p, rx_weights));
  for (const CsiProfile& p : reference) rf.push_back(amplitude_capture(p, rx_weights));
  return stitch_amplitudes(lv, rf, subcarriers_per_channel);
}

}  // namespace soiltag
