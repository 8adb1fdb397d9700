// Command line front end. Parses arguments, loads the JSON config and
// delegates to the shared-library command runner.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "soiltag/soiltag.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;    // usage / config / io errors
constexpr int kExitDomain = 2;   // domain or infeasibility errors

int exit_code_for(int status) {
  switch (status) {
    case SOILTAG_OK:
      return kExitOk;
    case SOILTAG_ERR_DOMAIN:
    case SOILTAG_ERR_INFEASIBLE:
      return kExitDomain;
    default:
      return kExitUsage;
  }
}

bool read_file(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  return true;
}

// Flat key,value listing of a one-level JSON report; nested values stay
// as compact JSON.
std::string report_as_csv(const std::string& report_json) {
  std::string out = "key,value\n";
  // Tiny scan: the reports are flat objects produced by this project.
  std::size_t i = report_json.find('{');
  if (i == std::string::npos) return out;
  ++i;
  int depth = 0;
  std::string key;
  std::string value;
  bool in_key = false;
  bool in_string = false;
  bool have_key = false;
  for (; i < report_json.size(); ++i) {
    const char c = report_json[i];
    if (in_string) {
      if (c == '"') {
        in_string = false;
      } else {
        (in_key ? key : value).push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      if (!have_key) in_key = true;
      continue;
    }
    if (c == ':' && depth == 0 && !have_key) {
      have_key = true;
      in_key = false;
      continue;
    }
    if ((c == ',' && depth == 0) || (c == '}' && depth == 0)) {
      if (have_key) {
        out += key + "," + value + "\n";
      }
      key.clear();
      value.clear();
      have_key = false;
      if (c == '}') break;
      continue;
    }
    if (c == '{' || c == '[') ++depth;
    if (c == '}' || c == ']') --depth;
    if (have_key && !std::isspace(static_cast<unsigned char>(c))) value.push_back(c);
    if (!have_key && !std::isspace(static_cast<unsigned char>(c)) && c != ',') {
      in_key = true;
      key.push_back(c);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chipless Wi-Fi tag soil-moisture sensing simulator"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "json";
  app.add_option("--seed", seed, "Global seed (SOILTAG_SEED overrides)");
  app.add_option("--out-dir", out_dir, "Directory for output artifacts");
  app.add_option("--format", format, "Report format on stdout")
      ->check(CLI::IsMember({"json", "csv"}));

  struct Command {
    const char* name;
    const char* help;
    bool needs_config;
  };
  const std::vector<Command> commands = {
      {"design", "Search slot geometry for a moisture range", false},
      {"align", "Estimate tag AoD/AoA and beam alignment", false},
      {"dataset", "Generate a labeled feature dataset", false},
      {"features", "Extract features from raw CSI captures", true},
      {"train", "Train the tree-ensemble regressor", true},
      {"predict", "Predict moisture for dataset rows", true},
      {"eval", "Evaluate a model on a labeled dataset", true},
      {"e2e", "Dataset, split, train and evaluate in one run", false},
      {"sweep", "Repeat e2e across SNR values", false},
  };

  std::string config_path;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    CLI::Option* opt = sub->add_option("--config", config_path, "JSON config file");
    if (c.needs_config) opt->required();
  }

  CLI11_PARSE(app, argc, argv);

  if (const char* env_seed = std::getenv("SOILTAG_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0') {
      std::cerr << "error: SOILTAG_SEED is not an integer: " << env_seed << "\n";
      return kExitUsage;
    }
    seed = v;
  }

  std::string config_json = "{}";
  if (!config_path.empty() && !read_file(config_path, &config_json)) {
    std::cerr << "error: cannot read config file " << config_path << "\n";
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  char* report = nullptr;
  const int status =
      soiltag_run(command.c_str(), config_json.c_str(), out_dir.c_str(), seed, &report);
  if (status != SOILTAG_OK) {
    std::cerr << "error: " << soiltag_last_error() << "\n";
    return exit_code_for(status);
  }
  if (report != nullptr) {
    if (format == "csv") {
      std::cout << report_as_csv(report);
    } else {
      std::cout << report << "\n";
    }
    soiltag_string_free(report);
  }
  return kExitOk;
}
