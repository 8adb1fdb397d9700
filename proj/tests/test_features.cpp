#include <doctest.h>

#include <cmath>

#include "core/beam_align.hpp"
#include "core/channel.hpp"
#include "core/constants.hpp"
#include "core/csi_features.hpp"
#include "core/errors.hpp"
#include "core/pipeline.hpp"

using namespace soiltag;

namespace {

// Minimal capture pair for stitching tests: no noise, optional response
// shaping, optionally with the line of sight removed.
std::vector<CsiProfile> capture_13(const std::optional<FrequencyResponse>& response,
                                   double gain_scale = 1.0, bool tag_only = false) {
  ScenarioConfig cfg;
  cfg.environment = "chamber";
  Scene scene = make_scenario(cfg);
  if (tag_only) {
    scene.paths.erase(scene.paths.begin());  // drop LoS, keep the tag
  }
  for (Path& p : scene.paths) p.gain *= gain_scale;
  std::vector<CsiProfile> capture;
  const std::vector<cplx> w(cfg.tx_array.num_elements,
                            cplx{1.0 / std::sqrt(8.0), 0.0});
  for (int ch = 1; ch <= kNumChannels; ++ch) {
    capture.push_back(
        synthesize_csi(scene.paths, response, w, cfg.tx_array, cfg.rx_array, ch, 0.0, 0));
  }
  return capture;
}

std::vector<cplx> rx_uniform() { return std::vector<cplx>(4, cplx{0.5, 0.0}); }

}  // namespace

TEST_CASE("filter gain basics") {
  CHECK(filter_gain(1.0, 1.0) == 0.0);
  CHECK(filter_gain(10.0, 1.0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(filter_gain(2.0, 1.0) == doctest::Approx(6.0206).epsilon(1e-5));
  CHECK(filter_gain(0.0, 1.0) == -80.0);
  CHECK_THROWS_AS(filter_gain(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(filter_gain(-1.0, 1.0), DomainError);
}

TEST_CASE("stitching 13 channels x 8 subcarriers gives 104 increasing frequencies") {
  const std::vector<CsiProfile> live = capture_13(tag_response(DgsGeometry{}, 0.10));
  const std::vector<CsiProfile> ref = capture_13(std::nullopt);
  const FeatureVector fv = stitch_channels(live, ref, rx_uniform(), 8);
  REQUIRE(fv.freqs_hz.size() == 104);
  REQUIRE(fv.gain_db.size() == 104);
  for (std::size_t i = 1; i < fv.freqs_hz.size(); ++i) {
    CHECK(fv.freqs_hz[i] > fv.freqs_hz[i - 1]);
  }
}

TEST_CASE("identity tag response and zero noise give an all-zero feature") {
  FrequencyResponse flat;
  flat.freqs_hz = {2.39e9, 2.49e9};
  flat.gain_db = {0.0, 0.0};
  const std::vector<CsiProfile> live = capture_13(flat);
  const std::vector<CsiProfile> ref = capture_13(std::nullopt);
  const FeatureVector fv = stitch_channels(live, ref, rx_uniform(), 8);
  for (double g : fv.gain_db) CHECK(std::abs(g) < 1e-12);
}

TEST_CASE("a notch in the tag response surfaces at the nearest selected subcarrier") {
  FrequencyResponse notch;
  for (double f = 2.39e9; f <= 2.49e9; f += 0.5e6) {
    notch.freqs_hz.push_back(f);
    notch.gain_db.push_back(-3.0 - 40.0 * std::exp(-std::pow((f - 2.44e9) / 3e6, 2.0)));
  }
  // LoS suppressed so the ratio reads the tag response directly.
  const std::vector<CsiProfile> live = capture_13(notch, 1.0, true);
  const std::vector<CsiProfile> ref = capture_13(std::nullopt, 1.0, true);
  const FeatureVector fv = stitch_channels(live, ref, rx_uniform(), 8);

  std::size_t argmin = 0;
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < fv.freqs_hz.size(); ++i) {
    if (fv.gain_db[i] < fv.gain_db[argmin]) argmin = i;
    if (std::abs(fv.freqs_hz[i] - 2.44e9) < std::abs(fv.freqs_hz[nearest] - 2.44e9)) {
      nearest = i;
    }
  }
  CHECK(argmin == nearest);
}

TEST_CASE("scaling all path gains in both captures cancels exactly") {
  const FrequencyResponse fr = tag_response(DgsGeometry{}, 0.05);
  const FeatureVector base =
      stitch_channels(capture_13(fr), capture_13(std::nullopt), rx_uniform(), 8);
  const FeatureVector scaled =
      stitch_channels(capture_13(fr, 3.7), capture_13(std::nullopt, 3.7), rx_uniform(), 8);
  REQUIRE(base.gain_db.size() == scaled.gain_db.size());
  for (std::size_t i = 0; i < base.gain_db.size(); ++i) {
    CHECK(std::abs(base.gain_db[i] - scaled.gain_db[i]) <= 1e-9);
  }
}

TEST_CASE("wide blocks overlap and deduplicate to a strictly increasing grid") {
  const std::vector<CsiProfile> live = capture_13(std::nullopt);
  const std::vector<CsiProfile> ref = capture_13(std::nullopt);
  const FeatureVector fv = stitch_channels(live, ref, rx_uniform(), 32);
  // 13 channels x 32 selected, overlapping 16 per adjacent pair.
  CHECK(fv.freqs_hz.size() == 13 * 32 - 12 * 16);
  for (std::size_t i = 1; i < fv.freqs_hz.size(); ++i) {
    CHECK(fv.freqs_hz[i] > fv.freqs_hz[i - 1]);
  }
}

TEST_CASE("mismatched channel sets are rejected") {
  std::vector<CsiProfile> live = capture_13(std::nullopt);
  std::vector<CsiProfile> ref = capture_13(std::nullopt);
  ref.pop_back();
  CHECK_THROWS_AS(stitch_channels(live, ref, rx_uniform(), 8), ShapeError);
  CHECK_THROWS_AS(stitch_channels(live, capture_13(std::nullopt), rx_uniform(), 0),
                  DomainError);
  CHECK_THROWS_AS(stitch_channels(live, capture_13(std::nullopt), rx_uniform(), 65),
                  DomainError);
}
