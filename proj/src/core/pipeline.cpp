#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"
#include "core/soil.hpp"

namespace soiltag {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::array<double, 2> get_pos(const json& j, const std::string& key,
                              std::array<double, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError("'" + key + "' must be [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

// Frequency grid for tag responses: covers every subcarrier of the 13
// channels with margin for interpolation.
std::vector<double> response_grid() {
  std::vector<double> grid;
  for (double f = 2.398e9; f <= 2.486e9 + 1.0; f += 250e3) grid.push_back(f);
  return grid;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace

FrequencyResponse tag_response(const DgsGeometry& geometry, double theta) {
  const double eps = topp_permittivity(theta);
  return frequency_response(lump_from_geometry(geometry, eps), response_grid());
}

ScenarioConfig parse_scenario(const json& j, std::uint64_t fallback_seed) {
  ScenarioConfig cfg;
  cfg.tx_pos = get_pos(j, "tx_pos", cfg.tx_pos);
  cfg.rx_pos = get_pos(j, "rx_pos", cfg.rx_pos);
  cfg.tag_pos = get_pos(j, "tag_pos", cfg.tag_pos);
  cfg.tx_axis_deg = get_or(j, "tx_axis_deg", cfg.tx_axis_deg);
  cfg.rx_axis_deg = get_or(j, "rx_axis_deg", cfg.rx_axis_deg);
  cfg.tx_array.num_elements = get_or(j, "tx_elements", cfg.tx_array.num_elements);
  cfg.rx_array.num_elements = get_or(j, "rx_elements", cfg.rx_array.num_elements);
  cfg.tx_array.spacing_wavelengths =
      get_or(j, "element_spacing", cfg.tx_array.spacing_wavelengths);
  cfg.rx_array.spacing_wavelengths = cfg.tx_array.spacing_wavelengths;
  cfg.environment = get_or<std::string>(j, "environment", cfg.environment);
  cfg.clutter_override = get_or(j, "clutter", cfg.clutter_override);
  cfg.snr_db = get_or(j, "snr_db", cfg.snr_db);
  cfg.tag_gain_dbi = get_or(j, "tag_gain_dbi", cfg.tag_gain_dbi);
  cfg.include_tag = get_or(j, "include_tag", cfg.include_tag);
  cfg.seed = get_or<std::uint64_t>(j, "seed", fallback_seed);
  return cfg;
}

DgsGeometry parse_geometry(const json& j) {
  DgsGeometry g;
  if (!j.contains("w_mm") || !j.contains("a_mm")) {
    throw ConfigError("geometry needs 'w_mm' and 'a_mm'");
  }
  g.w_mm = j.at("w_mm").get<double>();
  g.a_mm = j.at("a_mm").get<double>();
  g.substrate_thickness_mm = get_or(j, "substrate_thickness_mm", g.substrate_thickness_mm);
  g.line_width_mm = get_or(j, "line_width_mm", g.line_width_mm);
  return g;
}

ForestHyperparams parse_hyperparams(const json& j) {
  ForestHyperparams hp;
  hp.n_trees = get_or(j, "n_trees", hp.n_trees);
  hp.max_depth = get_or(j, "max_depth", hp.max_depth);
  hp.min_leaf = get_or(j, "min_leaf", hp.min_leaf);
  hp.features_per_split = get_or(j, "features_per_split", hp.features_per_split);
  hp.validate();
  return hp;
}

void split_dataset(const Dataset& all, double train_fraction, Dataset* train, Dataset* test) {
  check_domain(train_fraction > 0.0 && train_fraction < 1.0,
               "train fraction must be in (0, 1)");
  train->freqs_hz = all.freqs_hz;
  test->freqs_hz = all.freqs_hz;
  train->rows.clear();
  test->rows.clear();

  std::vector<std::size_t> order(all.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> keys(all.rows.size());
  for (std::size_t i = 0; i < all.rows.size(); ++i) {
    keys[i] = derive_seed(all.rows[i].seed, "split");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
  });
  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(all.rows.size())));
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train : test)->rows.push_back(all.rows[order[i]]);
  }
}

DatasetPlan parse_dataset_plan(const json& j, std::uint64_t seed) {
  DatasetPlan plan;
  plan.scenario = parse_scenario(j.value("scenario", json::object()),
                                 derive_seed(seed, "scenario"));
  if (j.contains("tags")) {
    plan.tags.clear();
    for (const json& g : j.at("tags")) plan.tags.push_back(parse_geometry(g));
    check_domain(!plan.tags.empty(), "plan needs at least one tag");
  } else if (j.contains("geometry")) {
    plan.tags = {parse_geometry(j.at("geometry"))};
  }
  if (j.contains("levels_percent")) {
    plan.levels_percent = j.at("levels_percent").get<std::vector<double>>();
  } else {
    plan.levels_percent = linspace(0.0, 20.0, 10);
  }
  check_domain(!plan.levels_percent.empty(), "plan needs at least one moisture level");
  plan.environments = get_or(j, "environments", std::vector<std::string>{"open_room"});
  check_domain(!plan.environments.empty(), "plan needs at least one environment");
  plan.packets_per_level = get_or(j, "packets_per_level", plan.packets_per_level);
  plan.reference_packets = get_or(j, "reference_packets", plan.reference_packets);
  plan.subcarriers_per_channel =
      get_or(j, "subcarriers_per_channel", plan.subcarriers_per_channel);
  plan.align = get_or(j, "align", plan.align);
  plan.emit_raw = get_or(j, "emit_raw", plan.emit_raw);
  check_domain(plan.packets_per_level >= 1, "need at least one packet per level");
  check_domain(plan.reference_packets >= 1, "need at least one reference packet");
  return plan;
}

namespace {

struct CellBeams {
  double aod_deg = 0.0;
  double aoa_deg = 0.0;
  std::vector<std::vector<cplx>> tx_weights;  // per channel
  std::vector<std::vector<cplx>> rx_weights;
};

CellBeams beams_for(const ScenarioConfig& cfg, double aod_deg, double aoa_deg) {
  CellBeams beams;
  beams.aod_deg = aod_deg;
  beams.aoa_deg = aoa_deg;
  beams.tx_weights.reserve(kNumChannels);
  beams.rx_weights.reserve(kNumChannels);
  for (int ch = 1; ch <= kNumChannels; ++ch) {
    const double f = channel_center_hz(ch);
    beams.tx_weights.push_back(beamforming_weights(cfg.tx_array, aod_deg, f));
    beams.rx_weights.push_back(beamforming_weights(cfg.rx_array, aoa_deg, f));
  }
  return beams;
}

// One 13-channel sweep.
std::vector<CsiProfile> capture_packet(const Scene& scene,
                                       const std::optional<FrequencyResponse>& response,
                                       const ScenarioConfig& cfg, const CellBeams& beams,
                                       double noise_power, std::uint64_t packet_seed) {
  std::vector<CsiProfile> capture;
  capture.reserve(kNumChannels);
  for (int ch = 1; ch <= kNumChannels; ++ch) {
    capture.push_back(synthesize_csi(scene.paths, response, beams.tx_weights[ch - 1],
                                     cfg.tx_array, cfg.rx_array, ch, noise_power,
                                     derive_seed(packet_seed, static_cast<std::uint64_t>(ch))));
  }
  return capture;
}

std::vector<AmplitudeCapture> capture_amplitudes(const std::vector<CsiProfile>& capture,
                                                 const CellBeams& beams) {
  std::vector<AmplitudeCapture> amps;
  amps.reserve(capture.size());
  for (std::size_t i = 0; i < capture.size(); ++i) {
    amps.push_back(amplitude_capture(capture[i], beams.rx_weights[i]));
  }
  return amps;
}

}  // namespace

Dataset generate_dataset(const DatasetPlan& plan, std::uint64_t seed,
                         DatasetGenReport* report, std::vector<RawCell>* raw_out) {
  Dataset dataset;
  DatasetGenReport local;
  DatasetGenReport& rep = report ? *report : local;

  for (const std::string& env : plan.environments) {
    const std::uint64_t env_seed = derive_seed(seed, env);
    for (std::size_t li = 0; li < plan.levels_percent.size(); ++li) {
      const double level = plan.levels_percent[li];
      const std::uint64_t cell_seed = derive_seed(env_seed, static_cast<std::uint64_t>(li));
      ++rep.cells_total;

      ScenarioConfig cfg = plan.scenario;
      cfg.environment = env;
      cfg.seed = cell_seed;
      std::vector<FrequencyResponse> responses;
      responses.reserve(plan.tags.size());
      for (const DgsGeometry& geom : plan.tags) {
        responses.push_back(tag_response(geom, level / 100.0));
      }

      // All tags share the mount position, so one alignment serves the cell.
      double aod = 0.0;
      double aoa = 0.0;
      if (plan.align) {
        try {
          const AlignOutput aligned = align_tag(cfg, responses.front(), plan.align_options);
          aod = aligned.result.aod_deg;
          aoa = aligned.result.aoa_deg;
        } catch (const InfeasibleError& e) {
          ++rep.cells_skipped;
          rep.warnings.push_back("cell env=" + env + " level=" + fmt_double(level) +
                                 " skipped: " + e.what());
          continue;
        }
      } else {
        aod = angle_from_axis(cfg.tx_pos, cfg.tx_axis_deg, cfg.tag_pos);
        aoa = angle_from_axis(cfg.rx_pos, cfg.rx_axis_deg, cfg.tag_pos);
      }
      const CellBeams beams = beams_for(cfg, aod, aoa);
      const Scene scene = make_scenario(cfg);

      RawCell raw;
      raw.env = env;
      raw.level_percent = level;
      raw.per_tag.resize(plan.tags.size());

      // Reference per tag: the unloaded (flat-response) tag, amplitude
      // averaged over many packets so the ratio sees a stable baseline.
      std::vector<std::vector<AmplitudeCapture>> ref_means(plan.tags.size());
      for (std::size_t t = 0; t < plan.tags.size(); ++t) {
        const std::uint64_t ref_seed =
            derive_seed(derive_seed(cell_seed, "ref"), static_cast<std::uint64_t>(t));
        std::vector<AmplitudeCapture>& ref_mean = ref_means[t];
        for (int pkt = 0; pkt < plan.reference_packets; ++pkt) {
          const std::vector<CsiProfile> capture =
              capture_packet(scene, std::nullopt, cfg, beams, scene.noise_power,
                             derive_seed(ref_seed, static_cast<std::uint64_t>(pkt)));
          const std::vector<AmplitudeCapture> amps = capture_amplitudes(capture, beams);
          if (ref_mean.empty()) {
            ref_mean = amps;
          } else {
            for (std::size_t c = 0; c < amps.size(); ++c) {
              for (std::size_t s = 0; s < amps[c].amplitude.size(); ++s) {
                ref_mean[c].amplitude[s] += amps[c].amplitude[s];
              }
            }
          }
          if (plan.emit_raw && raw_out) raw.per_tag[t].reference_packets.push_back(capture);
        }
        for (AmplitudeCapture& cap : ref_mean) {
          for (double& a : cap.amplitude) a /= static_cast<double>(plan.reference_packets);
        }
      }

      const std::uint64_t live_seed = derive_seed(cell_seed, "live");
      for (int pkt = 0; pkt < plan.packets_per_level; ++pkt) {
        const std::uint64_t row_seed = derive_seed(live_seed, static_cast<std::uint64_t>(pkt));
        DatasetRow row;
        std::vector<double> row_freqs;
        for (std::size_t t = 0; t < plan.tags.size(); ++t) {
          const std::vector<CsiProfile> capture =
              capture_packet(scene, responses[t], cfg, beams, scene.noise_power,
                             derive_seed(row_seed, static_cast<std::uint64_t>(t)));
          const FeatureVector fv = stitch_amplitudes(capture_amplitudes(capture, beams),
                                                     ref_means[t],
                                                     plan.subcarriers_per_channel);
          row_freqs.insert(row_freqs.end(), fv.freqs_hz.begin(), fv.freqs_hz.end());
          row.gains_db.insert(row.gains_db.end(), fv.gain_db.begin(), fv.gain_db.end());
          if (plan.emit_raw && raw_out) raw.per_tag[t].live_packets.push_back(capture);
        }
        if (dataset.freqs_hz.empty()) {
          dataset.freqs_hz = row_freqs;
        } else {
          check_shape(dataset.freqs_hz == row_freqs, "feature grid changed between cells");
        }
        row.label_percent = level;
        row.env = env;
        row.seed = row_seed;
        dataset.rows.push_back(std::move(row));
      }
      if (plan.emit_raw && raw_out) raw_out->push_back(std::move(raw));
    }
  }
  return dataset;
}

namespace {

json geometry_to_json(const DgsGeometry& g) {
  return json{{"w_mm", g.w_mm},
              {"a_mm", g.a_mm},
              {"substrate_thickness_mm", g.substrate_thickness_mm},
              {"line_width_mm", g.line_width_mm}};
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

}  // namespace

json run_design(const json& config, const std::string& out_dir) {
  std::vector<double> levels =
      get_or(config, "moisture_levels", std::vector<double>{0.0, 0.05, 0.10, 0.15, 0.20});
  if (levels.empty()) throw ConfigError("design needs a non-empty moisture level list");
  std::vector<double> band = get_or(config, "band_hz", std::vector<double>{2.5e9, 2.6e9});
  if (band.size() != 2) throw ConfigError("'band_hz' must be [lo, hi]");

  SearchSpace space;
  if (config.contains("search_space")) {
    const json& s = config.at("search_space");
    if (s.contains("w_mm")) {
      const auto w = s.at("w_mm").get<std::vector<double>>();
      if (w.size() != 3) throw ConfigError("'search_space.w_mm' must be [min, max, step]");
      space.w_min_mm = w[0];
      space.w_max_mm = w[1];
      space.w_step_mm = w[2];
    }
    if (s.contains("a_mm")) {
      const auto a = s.at("a_mm").get<std::vector<double>>();
      if (a.size() != 3) throw ConfigError("'search_space.a_mm' must be [min, max, step]");
      space.a_min_mm = a[0];
      space.a_max_mm = a[1];
      space.a_step_mm = a[2];
    }
  }

  const TuneResult tuned = tune_geometry(levels, band[0], band[1], space);

  // Gain curves per level for plotting.
  const double lo = get_or(config, "curve_lo_hz", 1.7e9);
  const double hi = get_or(config, "curve_hi_hz", 2.7e9);
  const double step = get_or(config, "curve_step_hz", 1e6);
  std::vector<double> grid;
  for (double f = lo; f <= hi + 1.0; f += step) grid.push_back(f);

  CsvTable curves;
  curves.header.push_back("freq_hz");
  std::vector<FrequencyResponse> responses;
  for (double theta : levels) {
    curves.header.push_back("gain_db_" + fmt_double(theta * 100.0));
    responses.push_back(
        frequency_response(lump_from_geometry(tuned.geometry, topp_permittivity(theta)), grid));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(fmt_double(grid[i]));
    for (const FrequencyResponse& r : responses) row.push_back(fmt_double(r.gain_db[i]));
    curves.rows.push_back(std::move(row));
  }
  atomic_write_text(join_path(out_dir, "gain_curves.csv"), render_csv(curves));

  json report;
  report["geometry"] = geometry_to_json(tuned.geometry);
  report["fc_per_level_hz"] = tuned.fc_per_level_hz;
  report["delta_f_hz"] = tuned.delta_f_hz;
  report["min_delta_f_hz"] = tuned.min_delta_f_hz;
  report["moisture_levels"] = levels;
  report["band_hz"] = band;
  atomic_write_text(join_path(out_dir, "design.json"), report.dump(2) + "\n");
  return report;
}

json run_align(const json& config, const std::string& out_dir, std::uint64_t seed) {
  const ScenarioConfig cfg = parse_scenario(config.value("scenario", json::object()),
                                            derive_seed(seed, "align"));
  const DgsGeometry geometry = config.contains("geometry")
                                   ? parse_geometry(config.at("geometry"))
                                   : DgsGeometry{};
  const double theta = get_or(config, "theta", 0.10);

  AlignOptions options;
  options.scan_step_deg = get_or(config, "scan_step_deg", options.scan_step_deg);
  options.packets_per_angle = get_or(config, "packets_per_angle", options.packets_per_angle);
  options.scan_channels = get_or(config, "scan_channels", options.scan_channels);
  options.differential = get_or(config, "differential", options.differential);
  options.aoa.packets = get_or(config, "aoa_packets", options.aoa.packets);
  options.aoa.num_sources = get_or(config, "num_sources", options.aoa.num_sources);
  options.aoa.grid_step_deg = get_or(config, "aoa_grid_step_deg", options.aoa.grid_step_deg);

  const AlignOutput out = align_tag(cfg, tag_response(geometry, theta), options);

  CsvTable profile;
  profile.header = {"angle_deg", "power_db_with_tag"};
  const bool has_ref = !out.profile_without_tag.angles_deg.empty();
  if (has_ref) profile.header.push_back("power_db_without_tag");
  for (std::size_t i = 0; i < out.profile_with_tag.angles_deg.size(); ++i) {
    std::vector<std::string> row{fmt_double(out.profile_with_tag.angles_deg[i]),
                                 fmt_double(out.profile_with_tag.power_db[i])};
    if (has_ref) row.push_back(fmt_double(out.profile_without_tag.power_db[i]));
    profile.rows.push_back(std::move(row));
  }
  atomic_write_text(join_path(out_dir, "aod_profile.csv"), render_csv(profile));

  CsvTable spectrum;
  spectrum.header = {"angle_deg", "pseudo_db_with_tag", "pseudo_db_without_tag"};
  for (std::size_t i = 0; i < out.aoa.grid_deg.size(); ++i) {
    spectrum.rows.push_back({fmt_double(out.aoa.grid_deg[i]),
                             fmt_double(10.0 * std::log10(out.aoa.spectrum_with_tag[i])),
                             fmt_double(10.0 * std::log10(out.aoa.spectrum_without_tag[i]))});
  }
  atomic_write_text(join_path(out_dir, "music_spectrum.csv"), render_csv(spectrum));

  json report;
  report["aod_deg"] = out.result.aod_deg;
  report["aoa_deg"] = out.result.aoa_deg;
  report["confidence_db"] = out.result.confidence_db;
  atomic_write_text(join_path(out_dir, "align.json"), report.dump(2) + "\n");
  return report;
}

json run_dataset(const json& config, const std::string& out_dir, std::uint64_t seed) {
  const DatasetPlan plan = parse_dataset_plan(config, seed);
  DatasetGenReport gen;
  std::vector<RawCell> raw;
  const Dataset dataset = generate_dataset(plan, derive_seed(seed, "dataset"), &gen,
                                           plan.emit_raw ? &raw : nullptr);
  atomic_write_text(join_path(out_dir, "dataset.csv"), render_dataset(dataset));

  if (plan.emit_raw) {
    for (const RawCell& cell : raw) {
      for (std::size_t t = 0; t < cell.per_tag.size(); ++t) {
        const std::string stem = "raw/" + cell.env + "_L" + fmt_double(cell.level_percent) +
                                 "_tag" + std::to_string(t);
        atomic_write_text(join_path(out_dir, stem + "_live.csv"),
                          render_raw_csi(cell.per_tag[t].live_packets));
        atomic_write_text(join_path(out_dir, stem + "_reference.csv"),
                          render_raw_csi(cell.per_tag[t].reference_packets));
      }
    }
  }

  json report;
  report["rows"] = dataset.rows.size();
  report["features"] = dataset.freqs_hz.size();
  report["cells_total"] = gen.cells_total;
  report["cells_skipped"] = gen.cells_skipped;
  report["warnings"] = gen.warnings;
  atomic_write_text(join_path(out_dir, "dataset_report.json"), report.dump(2) + "\n");
  return report;
}

json run_features(const json& config, const std::string& out_dir) {
  if (!config.contains("live_csv") || !config.contains("reference_csv")) {
    throw ConfigError("features needs 'live_csv' and 'reference_csv' paths");
  }
  const auto live_packets = parse_raw_csi(read_text(config.at("live_csv").get<std::string>()));
  const auto ref_packets =
      parse_raw_csi(read_text(config.at("reference_csv").get<std::string>()));
  if (live_packets.empty() || ref_packets.empty()) {
    throw ConfigError("raw CSI captures are empty");
  }
  const int subcarriers = get_or(config, "subcarriers_per_channel", 8);

  // Rx combining toward the given arrival angle; uniform when absent.
  const int num_rx = live_packets.front().front().num_rx;
  ArrayGeometry rx_array{num_rx, get_or(config, "element_spacing", 0.5)};
  std::vector<std::vector<cplx>> rx_weights;
  for (std::size_t c = 0; c < live_packets.front().size(); ++c) {
    const int ch = live_packets.front()[c].channel_index;
    if (config.contains("aoa_deg")) {
      rx_weights.push_back(beamforming_weights(rx_array, config.at("aoa_deg").get<double>(),
                                               channel_center_hz(ch)));
    } else {
      rx_weights.push_back(std::vector<cplx>(
          num_rx, cplx{1.0 / std::sqrt(static_cast<double>(num_rx)), 0.0}));
    }
  }

  auto mean_amplitudes = [&](const std::vector<std::vector<CsiProfile>>& packets) {
    std::vector<AmplitudeCapture> mean;
    for (const std::vector<CsiProfile>& capture : packets) {
      check_shape(capture.size() == packets.front().size(),
                  "captures must cover the same channels");
      for (std::size_t c = 0; c < capture.size(); ++c) {
        AmplitudeCapture amp = amplitude_capture(capture[c], rx_weights[c]);
        if (mean.size() <= c) {
          mean.push_back(amp);
        } else {
          for (std::size_t s = 0; s < amp.amplitude.size(); ++s) {
            mean[c].amplitude[s] += amp.amplitude[s];
          }
        }
      }
    }
    for (AmplitudeCapture& cap : mean) {
      for (double& a : cap.amplitude) a /= static_cast<double>(packets.size());
    }
    return mean;
  };

  const std::vector<AmplitudeCapture> ref_mean = mean_amplitudes(ref_packets);
  const FeatureVector averaged =
      stitch_amplitudes(mean_amplitudes(live_packets), ref_mean, subcarriers);
  atomic_write_text(join_path(out_dir, "features.csv"),
                    render_feature_csv(averaged.freqs_hz, averaged.gain_db));

  json report;
  report["features"] = averaged.freqs_hz.size();
  report["live_packets"] = live_packets.size();
  report["reference_packets"] = ref_packets.size();

  if (config.contains("label")) {
    const double label = config.at("label").get<double>();
    Dataset dataset;
    dataset.freqs_hz = averaged.freqs_hz;
    for (std::size_t pkt = 0; pkt < live_packets.size(); ++pkt) {
      std::vector<AmplitudeCapture> amps;
      for (std::size_t c = 0; c < live_packets[pkt].size(); ++c) {
        amps.push_back(amplitude_capture(live_packets[pkt][c], rx_weights[c]));
      }
      const FeatureVector fv = stitch_amplitudes(amps, ref_mean, subcarriers);
      DatasetRow row;
      row.gains_db = fv.gain_db;
      row.label_percent = label;
      row.env = get_or<std::string>(config, "env", "capture");
      row.seed = pkt;
      dataset.rows.push_back(std::move(row));
    }
    atomic_write_text(join_path(out_dir, "dataset.csv"), render_dataset(dataset));
    report["rows"] = dataset.rows.size();
  }
  return report;
}

json run_train(const json& config, const std::string& out_dir, std::uint64_t seed) {
  if (!config.contains("dataset_csv")) throw ConfigError("train needs 'dataset_csv'");
  const Dataset data = parse_dataset(read_text(config.at("dataset_csv").get<std::string>()));
  const ForestHyperparams hp = parse_hyperparams(config.value("hyperparams", json::object()));
  const ForestModel model = train_forest(data, hp, derive_seed(seed, "train"));
  atomic_write_text(join_path(out_dir, "model.json"), model.to_json() + "\n");

  json report;
  report["rows"] = data.rows.size();
  report["features"] = data.freqs_hz.size();
  report["n_trees"] = hp.n_trees;
  return report;
}

json run_predict(const json& config, const std::string& out_dir) {
  if (!config.contains("model") || !config.contains("dataset_csv")) {
    throw ConfigError("predict needs 'model' and 'dataset_csv'");
  }
  const ForestModel model =
      ForestModel::from_json(read_text(config.at("model").get<std::string>()));
  const Dataset data = parse_dataset(read_text(config.at("dataset_csv").get<std::string>()));
  check_shape(data.freqs_hz.size() == model.freqs_hz.size(),
              "dataset feature grid differs from the model");

  CsvTable out;
  out.header = {"sample", "label", "prediction"};
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    out.rows.push_back({std::to_string(i), fmt_double(data.rows[i].label_percent),
                        fmt_double(predict(model, data.rows[i].gains_db))});
  }
  atomic_write_text(join_path(out_dir, "predictions.csv"), render_csv(out));

  json report;
  report["rows"] = data.rows.size();
  return report;
}

namespace {

json report_from(const ErrorReport& rep) {
  return json{{"count", rep.count},
              {"mean_error", rep.mean},
              {"median_error", rep.median},
              {"p90_error", rep.p90}};
}

void write_cdf(const ErrorReport& rep, const std::string& path) {
  CsvTable cdf;
  cdf.header = {"error", "fraction"};
  for (std::size_t i = 0; i < rep.sorted_errors.size(); ++i) {
    cdf.rows.push_back({fmt_double(rep.sorted_errors[i]), fmt_double(rep.cdf_fraction(i))});
  }
  atomic_write_text(path, render_csv(cdf));
}

}  // namespace

json run_eval(const json& config, const std::string& out_dir) {
  if (!config.contains("model") || !config.contains("dataset_csv")) {
    throw ConfigError("eval needs 'model' and 'dataset_csv'");
  }
  const ForestModel model =
      ForestModel::from_json(read_text(config.at("model").get<std::string>()));
  const Dataset data = parse_dataset(read_text(config.at("dataset_csv").get<std::string>()));
  const ErrorReport rep = evaluate(model, data);
  write_cdf(rep, join_path(out_dir, "cdf.csv"));
  const json report = report_from(rep);
  atomic_write_text(join_path(out_dir, "eval.json"), report.dump(2) + "\n");
  return report;
}

json run_e2e(const json& config, const std::string& out_dir, std::uint64_t seed) {
  const DatasetPlan plan = parse_dataset_plan(config.value("dataset", json::object()), seed);
  DatasetGenReport gen;
  const Dataset dataset = generate_dataset(plan, derive_seed(seed, "dataset"), &gen);
  atomic_write_text(join_path(out_dir, "dataset.csv"), render_dataset(dataset));

  Dataset train;
  Dataset test;
  split_dataset(dataset, get_or(config, "train_fraction", 0.5), &train, &test);

  const ForestHyperparams hp = parse_hyperparams(config.value("hyperparams", json::object()));
  const ForestModel model = train_forest(train, hp, derive_seed(seed, "train"));
  atomic_write_text(join_path(out_dir, "model.json"), model.to_json() + "\n");

  const ErrorReport rep = evaluate(model, test);
  write_cdf(rep, join_path(out_dir, "cdf.csv"));

  json report = report_from(rep);
  report["train_rows"] = train.rows.size();
  report["test_rows"] = test.rows.size();
  report["cells_skipped"] = gen.cells_skipped;
  atomic_write_text(join_path(out_dir, "e2e.json"), report.dump(2) + "\n");
  return report;
}

json run_sweep(const json& config, const std::string& out_dir, std::uint64_t seed) {
  const std::string param = get_or<std::string>(config, "param", "snr_db");
  if (param != "snr_db") throw ConfigError("sweep supports only param 'snr_db'");
  const std::vector<double> values =
      get_or(config, "values", std::vector<double>{0.0, 10.0, 20.0, 30.0});
  if (values.empty()) throw ConfigError("sweep needs a non-empty value list");
  json base = config.value("e2e", json::object());

  CsvTable table;
  table.header = {"snr_db", "mean_error", "median_error", "p90_error"};
  json rows = json::array();
  for (double v : values) {
    json cfg = base;
    if (!cfg.contains("dataset")) cfg["dataset"] = json::object();
    if (!cfg["dataset"].contains("scenario")) cfg["dataset"]["scenario"] = json::object();
    cfg["dataset"]["scenario"]["snr_db"] = v;
    // Same derived seed for every point: only the swept parameter moves.
    const json rep = run_e2e(cfg, join_path(out_dir, "snr_" + fmt_double(v)), seed);
    table.rows.push_back({fmt_double(v), fmt_double(rep.at("mean_error").get<double>()),
                          fmt_double(rep.at("median_error").get<double>()),
                          fmt_double(rep.at("p90_error").get<double>())});
    json row = rep;
    row["snr_db"] = v;
    rows.push_back(std::move(row));
  }
  atomic_write_text(join_path(out_dir, "sweep.csv"), render_csv(table));

  json report;
  report["param"] = param;
  report["points"] = rows;
  atomic_write_text(join_path(out_dir, "sweep.json"), report.dump(2) + "\n");
  return report;
}

json run_command(const std::string& command, const json& config, const std::string& out_dir,
                 std::uint64_t seed) {
  if (command == "design") return run_design(config, out_dir);
  if (command == "align") return run_align(config, out_dir, seed);
  if (command == "dataset") return run_dataset(config, out_dir, seed);
  if (command == "features") return run_features(config, out_dir);
  if (command == "train") return run_train(config, out_dir, seed);
  if (command == "predict") return run_predict(config, out_dir);
  if (command == "eval") return run_eval(config, out_dir);
  if (command == "e2e") return run_e2e(config, out_dir, seed);
  if (command == "sweep") return run_sweep(config, out_dir, seed);
  throw ConfigError("unknown command: " + command);
}

json default_design_config() {
  return json{{"moisture_levels", {0.0, 0.05, 0.10, 0.15, 0.20}},
              {"band_hz", {2.5e9, 2.6e9}}};
}

json default_e2e_config() {
  return json{{"dataset",
               {{"levels_percent", linspace(0.0, 20.0, 10)},
                {"packets_per_level", 100},
                {"geometry", {{"w_mm", 0.1}, {"a_mm", 10.0}}},
                {"scenario", {{"snr_db", 25.0}}}}},
              {"train_fraction", 0.5}};
}

}  // namespace soiltag
