#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "core/beam_align.hpp"
#include "core/channel.hpp"
#include "core/csi_features.hpp"
#include "core/estimator.hpp"
#include "core/resonator.hpp"

namespace soiltag {

// Tag through-response over a grid covering all 13 Wi-Fi channels, for a
// slot geometry loaded by soil at the given moisture fraction.
FrequencyResponse tag_response(const DgsGeometry& geometry, double theta);

ScenarioConfig parse_scenario(const nlohmann::json& j, std::uint64_t fallback_seed);
DgsGeometry parse_geometry(const nlohmann::json& j);
ForestHyperparams parse_hyperparams(const nlohmann::json& j);

// Deterministic 50/50-style split on per-row seeds.
void split_dataset(const Dataset& all, double train_fraction, Dataset* train, Dataset* test);

struct DatasetGenReport {
  int cells_total = 0;
  int cells_skipped = 0;
  std::vector<std::string> warnings;
};

struct DatasetPlan {
  ScenarioConfig scenario;
  // One slot design per sensing range; several tags are captured
  // independently and their features concatenated, which is how a
  // multi-resonator deployment widens the measurable range.
  std::vector<DgsGeometry> tags{DgsGeometry{}};
  std::vector<double> levels_percent;
  std::vector<std::string> environments{"open_room"};
  int packets_per_level = 100;
  int reference_packets = 64;
  int subcarriers_per_channel = 8;
  bool align = true;
  bool emit_raw = false;
  AlignOptions align_options;
};

DatasetPlan parse_dataset_plan(const nlohmann::json& j, std::uint64_t seed);

// Scenario synthesis + beam alignment + feature extraction for every
// (environment, level, packet) cell. Raw captures are returned through
// raw_out (live/reference pairs per cell and tag) when requested.
struct RawCapturePair {
  std::vector<std::vector<CsiProfile>> live_packets;
  std::vector<std::vector<CsiProfile>> reference_packets;
};

struct RawCell {
  std::string env;
  double level_percent = 0.0;
  std::vector<RawCapturePair> per_tag;
};

Dataset generate_dataset(const DatasetPlan& plan, std::uint64_t seed,
                         DatasetGenReport* report, std::vector<RawCell>* raw_out = nullptr);

// Command implementations behind the CLI and the shared-library API.
// Each is a pure function of (config, out_dir, seed) that writes its
// artifacts atomically and returns a summary report.
nlohmann::json run_design(const nlohmann::json& config, const std::string& out_dir);
nlohmann::json run_align(const nlohmann::json& config, const std::string& out_dir,
                         std::uint64_t seed);
nlohmann::json run_dataset(const nlohmann::json& config, const std::string& out_dir,
                           std::uint64_t seed);
nlohmann::json run_features(const nlohmann::json& config, const std::string& out_dir);
nlohmann::json run_train(const nlohmann::json& config, const std::string& out_dir,
                         std::uint64_t seed);
nlohmann::json run_predict(const nlohmann::json& config, const std::string& out_dir);
nlohmann::json run_eval(const nlohmann::json& config, const std::string& out_dir);
nlohmann::json run_e2e(const nlohmann::json& config, const std::string& out_dir,
                       std::uint64_t seed);
nlohmann::json run_sweep(const nlohmann::json& config, const std::string& out_dir,
                         std::uint64_t seed);

// Dispatch by command name; unknown commands raise ConfigError.
nlohmann::json run_command(const std::string& command, const nlohmann::json& config,
                           const std::string& out_dir, std::uint64_t seed);

// Canonical configs used by docs and the acceptance harness.
nlohmann::json default_design_config();
nlohmann::json default_e2e_config();

}  // namespace soiltag
