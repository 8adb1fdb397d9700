#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/channel.hpp"
#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace soiltag;

namespace {

std::vector<cplx> uniform_weights(int n) {
  return std::vector<cplx>(n, cplx{1.0, 0.0});
}

double mean_power(const CsiProfile& p) {
  double s = 0.0;
  for (const cplx& h : p.h) s += std::norm(h);
  return s / static_cast<double>(p.h.size());
}

}  // namespace

TEST_CASE("channel centers and subcarrier grids") {
  CHECK(channel_center_hz(1) == 2412e6);
  CHECK(channel_center_hz(13) == 2472e6);
  CHECK_THROWS_AS(channel_center_hz(0), DomainError);
  CHECK_THROWS_AS(channel_center_hz(14), DomainError);

  const std::vector<double> f = subcarrier_freqs(7);
  REQUIRE(f.size() == 64);
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] > f[i - 1]);
  // Symmetric about the channel center.
  CHECK(f.front() + f.back() == doctest::Approx(2.0 * channel_center_hz(7)));
  CHECK(f[1] - f[0] == doctest::Approx(312.5e3));
}

TEST_CASE("steering vector is all ones at broadside") {
  const ArrayGeometry arr{8, 0.5};
  for (const cplx& v : steering_vector(arr, 90.0, 2.44e9)) {
    CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
  }
}

TEST_CASE("endfire half-wave steering alternates sign at the reference carrier") {
  const ArrayGeometry arr{4, 0.5};
  const std::vector<cplx> a = steering_vector(arr, 0.0, kArrayReferenceHz);
  for (int n = 0; n < 4; ++n) {
    const cplx want = std::polar(1.0, -kPi * n);
    CHECK(std::abs(a[n] - want) < 1e-12);
  }
}

TEST_CASE("steering vectors have unit-modulus entries and norm N") {
  const ArrayGeometry arr{8, 0.5};
  for (double angle : {0.0, 17.0, 45.0, 90.0, 133.0, 180.0}) {
    const std::vector<cplx> a = steering_vector(arr, angle, 2.46e9);
    double norm2 = 0.0;
    for (const cplx& v : a) norm2 += std::norm(v);
    CHECK(norm2 == doctest::Approx(8.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(steering_vector(arr, -1.0, 2.44e9), DomainError);
  CHECK_THROWS_AS(steering_vector(arr, 181.0, 2.44e9), DomainError);
}

TEST_CASE("single line-of-sight path gives a flat magnitude across subcarriers") {
  Path los;
  los.kind = PathKind::LoS;
  los.aod_deg = 90.0;
  los.aoa_deg = 90.0;
  los.gain = {2e-3, 0.0};
  los.delay_s = 13.3e-9;
  const ArrayGeometry tx{1, 0.5};
  const ArrayGeometry rx{1, 0.5};
  const CsiProfile csi =
      synthesize_csi({los}, std::nullopt, uniform_weights(1), tx, rx, 5, 0.0, 7);
  const double first = std::abs(csi.at(0, 0));
  for (std::size_t sc = 0; sc < csi.subcarrier_freqs_hz.size(); ++sc) {
    CHECK(std::abs(csi.at(sc, 0)) == doctest::Approx(first).epsilon(1e-12));
    // Phase rotates with delay.
    const double want_phase = -2.0 * kPi * csi.subcarrier_freqs_hz[sc] * los.delay_s;
    const double got = std::arg(csi.at(sc, 0));
    CHECK(std::abs(std::remainder(got - want_phase, 2.0 * kPi)) < 1e-9);
  }
}

TEST_CASE("tag notch shows up at the nearest subcarrier") {
  // Direct summation oracle: one tag path, notch at 2.44 GHz.
  Path tag;
  tag.kind = PathKind::TagReflection;
  tag.aod_deg = 90.0;
  tag.aoa_deg = 90.0;
  tag.gain = {1e-3, 0.0};
  tag.delay_s = 20e-9;

  FrequencyResponse notch;
  for (double f = 2.40e9; f <= 2.50e9; f += 1e6) {
    notch.freqs_hz.push_back(f);
    const double depth = -30.0 * std::exp(-std::pow((f - 2.44e9) / 4e6, 2.0));
    notch.gain_db.push_back(-9.5 + depth);
  }

  const ArrayGeometry one{1, 0.5};
  const CsiProfile csi =
      synthesize_csi({tag}, notch, uniform_weights(1), one, one, 7, 0.0, 3);

  std::size_t argmin = 0;
  for (std::size_t sc = 1; sc < csi.subcarrier_freqs_hz.size(); ++sc) {
    if (std::abs(csi.at(sc, 0)) < std::abs(csi.at(argmin, 0))) argmin = sc;
  }
  // Channel 7 covers 2442 +- 10 MHz; the notch at 2440 falls on its grid.
  std::size_t nearest = 0;
  for (std::size_t sc = 1; sc < csi.subcarrier_freqs_hz.size(); ++sc) {
    if (std::abs(csi.subcarrier_freqs_hz[sc] - 2.44e9) <
        std::abs(csi.subcarrier_freqs_hz[nearest] - 2.44e9)) {
      nearest = sc;
    }
  }
  CHECK(argmin == nearest);

  // Per-subcarrier values match a hand-rolled sum for this single path.
  for (std::size_t sc = 0; sc < csi.subcarrier_freqs_hz.size(); sc += 13) {
    const double f = csi.subcarrier_freqs_hz[sc];
    const cplx want = tag.gain * std::pow(10.0, notch.gain_at(f) / 20.0) *
                      std::polar(1.0, -2.0 * kPi * f * tag.delay_s);
    CHECK(std::abs(csi.at(sc, 0) - want) < 1e-15);
  }
}

TEST_CASE("identical seeds give bit-identical profiles") {
  const Scene scene = make_scenario(ScenarioConfig{});
  const ScenarioConfig cfg;
  const std::vector<cplx> w = uniform_weights(cfg.tx_array.num_elements);
  const CsiProfile a = synthesize_csi(scene.paths, std::nullopt, w, cfg.tx_array,
                                      cfg.rx_array, 3, scene.noise_power, 42);
  const CsiProfile b = synthesize_csi(scene.paths, std::nullopt, w, cfg.tx_array,
                                      cfg.rx_array, 3, scene.noise_power, 42);
  REQUIRE(a.h.size() == b.h.size());
  for (std::size_t i = 0; i < a.h.size(); ++i) CHECK(a.h[i] == b.h[i]);

  const CsiProfile c = synthesize_csi(scene.paths, std::nullopt, w, cfg.tx_array,
                                      cfg.rx_array, 3, scene.noise_power, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.h.size(); ++i) any_diff |= (a.h[i] != c.h[i]);
  CHECK(any_diff);
}

TEST_CASE("zero-noise synthesis is linear in the path set") {
  ScenarioConfig cfg;
  cfg.environment = "office";
  const Scene scene = make_scenario(cfg);
  REQUIRE(scene.paths.size() > 3);
  const std::vector<Path> first(scene.paths.begin(), scene.paths.begin() + 2);
  const std::vector<Path> rest(scene.paths.begin() + 2, scene.paths.end());
  const std::vector<cplx> w = uniform_weights(cfg.tx_array.num_elements);

  const CsiProfile all = synthesize_csi(scene.paths, std::nullopt, w, cfg.tx_array,
                                        cfg.rx_array, 1, 0.0, 0);
  const CsiProfile part1 =
      synthesize_csi(first, std::nullopt, w, cfg.tx_array, cfg.rx_array, 1, 0.0, 0);
  const CsiProfile part2 =
      synthesize_csi(rest, std::nullopt, w, cfg.tx_array, cfg.rx_array, 1, 0.0, 0);
  for (std::size_t i = 0; i < all.h.size(); ++i) {
    CHECK(std::abs(all.h[i] - (part1.h[i] + part2.h[i])) < 1e-12 * std::abs(all.h[i]) + 1e-18);
  }
}

TEST_CASE("doubling every path gain quadruples the mean power") {
  ScenarioConfig cfg;
  cfg.environment = "courtyard";
  Scene scene = make_scenario(cfg);
  const std::vector<cplx> w = uniform_weights(cfg.tx_array.num_elements);
  const double p1 = mean_power(synthesize_csi(scene.paths, std::nullopt, w, cfg.tx_array,
                                              cfg.rx_array, 2, 0.0, 0));
  for (Path& p : scene.paths) p.gain *= 2.0;
  const double p2 = mean_power(synthesize_csi(scene.paths, std::nullopt, w, cfg.tx_array,
                                              cfg.rx_array, 2, 0.0, 0));
  CHECK(p2 == doctest::Approx(4.0 * p1).epsilon(1e-12));
}

TEST_CASE("matched Tx steering gives the squared-element power gain") {
  ScenarioConfig cfg;
  cfg.environment = "chamber";
  const Scene scene = make_scenario(cfg);
  const Path tag = scene.paths[1];
  REQUIRE(tag.kind == PathKind::TagReflection);

  // Weights matched at one subcarrier; compare powers there.
  const std::size_t sc = 32;
  const double f_sc = subcarrier_freqs(7)[sc];

  const ArrayGeometry one{1, 0.5};
  const CsiProfile single =
      synthesize_csi({tag}, std::nullopt, uniform_weights(1), one, cfg.rx_array, 7, 0.0, 0);
  const CsiProfile array =
      synthesize_csi({tag}, std::nullopt, steering_vector(cfg.tx_array, tag.aod_deg, f_sc),
                     cfg.tx_array, cfg.rx_array, 7, 0.0, 0);

  const double n = cfg.tx_array.num_elements;
  double p_single = 0.0;
  double p_array = 0.0;
  for (int m = 0; m < cfg.rx_array.num_elements; ++m) {
    p_single += std::norm(single.at(sc, m));
    p_array += std::norm(array.at(sc, m));
  }
  CHECK(p_array / p_single == doctest::Approx(n * n).epsilon(1e-9));
}

TEST_CASE("scenario geometry: angles, delays and path count") {
  ScenarioConfig cfg;
  cfg.environment = "chamber";
  const Scene scene = make_scenario(cfg);
  REQUIRE(scene.paths.size() == 2);  // zero clutter: LoS + tag

  const Path& los = scene.paths[0];
  const Path& tag = scene.paths[1];
  CHECK(los.kind == PathKind::LoS);
  CHECK(tag.kind == PathKind::TagReflection);

  CHECK(los.aod_deg == doctest::Approx(40.0).epsilon(1e-6));
  CHECK(los.aoa_deg == doctest::Approx(90.0).epsilon(1e-6));
  CHECK(tag.aod_deg == doctest::Approx(102.0).epsilon(1e-3));
  CHECK(tag.aoa_deg == doctest::Approx(60.0).epsilon(1e-3));

  const double d1 = std::hypot(cfg.tag_pos[0] - cfg.tx_pos[0], cfg.tag_pos[1] - cfg.tx_pos[1]);
  const double d2 = std::hypot(cfg.tag_pos[0] - cfg.rx_pos[0], cfg.tag_pos[1] - cfg.rx_pos[1]);
  CHECK(tag.delay_s == doctest::Approx((d1 + d2) / kSpeedOfLight).epsilon(1e-12));
  CHECK(los.delay_s == doctest::Approx(4.0 / kSpeedOfLight).epsilon(1e-12));
}

TEST_CASE("scenario construction is deterministic per seed") {
  ScenarioConfig cfg;
  cfg.environment = "office";
  cfg.seed = 77;
  const Scene a = make_scenario(cfg);
  const Scene b = make_scenario(cfg);
  REQUIRE(a.paths.size() == b.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].gain == b.paths[i].gain);
    CHECK(a.paths[i].aod_deg == b.paths[i].aod_deg);
    CHECK(a.paths[i].delay_s == b.paths[i].delay_s);
  }
}

TEST_CASE("clutter does not depend on tag presence") {
  ScenarioConfig cfg;
  cfg.environment = "office";
  cfg.seed = 5;
  const Scene with_tag = make_scenario(cfg);
  cfg.include_tag = false;
  const Scene without = make_scenario(cfg);
  REQUIRE(with_tag.paths.size() == without.paths.size() + 1);
  // Same clutter draws in both scenes.
  for (std::size_t i = 0; i < without.paths.size() - 1; ++i) {
    CHECK(with_tag.paths[i + 2].gain == without.paths[i + 1].gain);
  }
}

TEST_CASE("coincident positions are rejected") {
  ScenarioConfig cfg;
  cfg.rx_pos = cfg.tx_pos;
  CHECK_THROWS_AS(make_scenario(cfg), DomainError);
}

TEST_CASE("tag response outside the grid is an error") {
  Path tag;
  tag.kind = PathKind::TagReflection;
  tag.gain = {1.0, 0.0};
  const ArrayGeometry one{1, 0.5};
  FrequencyResponse narrow;
  narrow.freqs_hz = {2.0e9, 2.45e9};  // stops below channel 13
  narrow.gain_db = {0.0, 0.0};
  CHECK_THROWS_AS(
      synthesize_csi({tag}, narrow, uniform_weights(1), one, one, 13, 0.0, 0), DomainError);
}

TEST_CASE("environment presets") {
  CHECK(environment_preset("chamber").clutter_count == 0);
  CHECK(environment_preset("office").clutter_count >
        environment_preset("open_room").clutter_count);
  CHECK(environment_preset("motion").snr_penalty_db > 0.0);
  CHECK_THROWS_AS(environment_preset("swamp"), ConfigError);
}
