#include "soiltag/soiltag.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/estimator.hpp"
#include "core/pipeline.hpp"
#include "core/resonator.hpp"
#include "core/soil.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Body>
int run_guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return SOILTAG_OK;
  } catch (const soiltag::ConfigError& e) {
    g_last_error = e.what();
    return SOILTAG_ERR_INVALID;
  } catch (const soiltag::IoError& e) {
    g_last_error = e.what();
    return SOILTAG_ERR_IO;
  } catch (const soiltag::ShapeError& e) {
    g_last_error = e.what();
    return SOILTAG_ERR_SHAPE;
  } catch (const soiltag::InfeasibleError& e) {
    g_last_error = e.what();
    return SOILTAG_ERR_INFEASIBLE;
  } catch (const soiltag::DomainError& e) {
    g_last_error = e.what();
    return SOILTAG_ERR_DOMAIN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SOILTAG_ERR_INTERNAL;
  }
}

int require(bool ok, const char* msg) {
  if (ok) return SOILTAG_OK;
  g_last_error = msg;
  return SOILTAG_ERR_INVALID;
}

soiltag::CircuitParams to_params(const soiltag_circuit& c) {
  soiltag::CircuitParams p;
  p.z_line = c.z_line_ohm;
  p.z_source = c.z_source_ohm;
  p.c1 = c.c1_farad;
  p.cc = c.cc_farad;
  p.lc = c.lc_henry;
  p.r_loss = c.r_loss_ohm;
  return p;
}

}  // namespace

struct soiltag_forest {
  soiltag::ForestModel model;
};

extern "C" {

const char* soiltag_version(void) { return "1.0.0"; }

const char* soiltag_last_error(void) { return g_last_error.c_str(); }

int soiltag_topp_permittivity(double theta, double* out_epsilon) {
  if (int rc = require(out_epsilon != nullptr, "out_epsilon is NULL")) return rc;
  return run_guarded([&] { *out_epsilon = soiltag::topp_permittivity(theta); });
}

int soiltag_vwc_to_gwc(double vwc, double bulk_density, double* out_gwc) {
  if (int rc = require(out_gwc != nullptr, "out_gwc is NULL")) return rc;
  return run_guarded([&] { *out_gwc = soiltag::vwc_to_gwc(vwc, bulk_density); });
}

int soiltag_circuit_from_geometry(double w_mm, double a_mm, double epsilon_soil,
                                  soiltag_circuit* out_circuit) {
  if (int rc = require(out_circuit != nullptr, "out_circuit is NULL")) return rc;
  return run_guarded([&] {
    soiltag::DgsGeometry geom;
    geom.w_mm = w_mm;
    geom.a_mm = a_mm;
    const soiltag::CircuitParams p = soiltag::lump_from_geometry(geom, epsilon_soil);
    out_circuit->z_line_ohm = p.z_line;
    out_circuit->z_source_ohm = p.z_source;
    out_circuit->c1_farad = p.c1;
    out_circuit->cc_farad = p.cc;
    out_circuit->lc_henry = p.lc;
    out_circuit->r_loss_ohm = p.r_loss;
  });
}

int soiltag_resonant_frequency(const soiltag_circuit* circuit, double* out_hz) {
  if (int rc = require(circuit != nullptr && out_hz != nullptr, "NULL argument")) return rc;
  return run_guarded([&] { *out_hz = soiltag::resonant_frequency(to_params(*circuit)); });
}

int soiltag_frequency_response(const soiltag_circuit* circuit, const double* freqs_hz,
                               size_t count, double* out_gain_db) {
  if (int rc = require(circuit != nullptr && freqs_hz != nullptr && out_gain_db != nullptr,
                       "NULL argument")) {
    return rc;
  }
  if (int rc = require(count > 0, "count must be > 0")) return rc;
  return run_guarded([&] {
    const soiltag::CircuitParams p = to_params(*circuit);
    for (size_t i = 0; i < count; ++i) {
      out_gain_db[i] = soiltag::gain_db_at(p, freqs_hz[i]);
    }
  });
}

int soiltag_filter_gain(double amplitude, double reference, double* out_db) {
  if (int rc = require(out_db != nullptr, "out_db is NULL")) return rc;
  return run_guarded([&] { *out_db = soiltag::filter_gain(amplitude, reference); });
}

int soiltag_dtw_distance(const double* x, size_t x_len, const double* y, size_t y_len,
                         double* out_cost) {
  if (int rc = require(x != nullptr && y != nullptr && out_cost != nullptr, "NULL argument")) {
    return rc;
  }
  return run_guarded([&] {
    *out_cost = soiltag::dtw_distance(std::vector<double>(x, x + x_len),
                                      std::vector<double>(y, y + y_len));
  });
}

int soiltag_forest_train(const double* features, const double* labels, size_t n_rows,
                         size_t n_features, const char* hyperparams_json, uint64_t seed,
                         soiltag_forest** out_forest) {
  if (int rc = require(features != nullptr && labels != nullptr && out_forest != nullptr,
                       "NULL argument")) {
    return rc;
  }
  return run_guarded([&] {
    soiltag::Dataset data;
    data.freqs_hz.resize(n_features);
    for (size_t f = 0; f < n_features; ++f) data.freqs_hz[f] = static_cast<double>(f);
    data.rows.resize(n_rows);
    for (size_t r = 0; r < n_rows; ++r) {
      data.rows[r].gains_db.assign(features + r * n_features,
                                   features + (r + 1) * n_features);
      data.rows[r].label_percent = labels[r];
      data.rows[r].seed = r;
    }
    soiltag::ForestHyperparams hp;
    if (hyperparams_json != nullptr && hyperparams_json[0] != '\0') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(hyperparams_json);
      } catch (const nlohmann::json::exception& e) {
        throw soiltag::ConfigError(std::string("invalid hyperparams JSON: ") + e.what());
      }
      hp = soiltag::parse_hyperparams(j);
    }
    *out_forest = new soiltag_forest{soiltag::train_forest(data, hp, seed)};
  });
}

int soiltag_forest_predict(const soiltag_forest* forest, const double* features,
                           size_t n_features, double* out_prediction) {
  if (int rc = require(forest != nullptr && features != nullptr && out_prediction != nullptr,
                       "NULL argument")) {
    return rc;
  }
  return run_guarded([&] {
    *out_prediction = soiltag::predict(forest->model,
                                       std::vector<double>(features, features + n_features));
  });
}

int soiltag_forest_to_json(const soiltag_forest* forest, char** out_json) {
  if (int rc = require(forest != nullptr && out_json != nullptr, "NULL argument")) return rc;
  return run_guarded([&] { *out_json = dup_string(forest->model.to_json()); });
}

int soiltag_forest_from_json(const char* json, soiltag_forest** out_forest) {
  if (int rc = require(json != nullptr && out_forest != nullptr, "NULL argument")) return rc;
  return run_guarded(
      [&] { *out_forest = new soiltag_forest{soiltag::ForestModel::from_json(json)}; });
}

void soiltag_forest_free(soiltag_forest* forest) { delete forest; }

int soiltag_run(const char* command, const char* config_json, const char* out_dir,
                uint64_t seed, char** out_report) {
  if (int rc = require(command != nullptr && out_dir != nullptr, "NULL argument")) return rc;
  return run_guarded([&] {
    nlohmann::json config = nlohmann::json::object();
    if (config_json != nullptr && config_json[0] != '\0') {
      try {
        config = nlohmann::json::parse(config_json);
      } catch (const nlohmann::json::exception& e) {
        throw soiltag::ConfigError(std::string("invalid config JSON: ") + e.what());
      }
    }
    const nlohmann::json report = soiltag::run_command(command, config, out_dir, seed);
    if (out_report != nullptr) *out_report = dup_string(report.dump(2));
  });
}

void soiltag_string_free(char* s) { delete[] s; }

}  // extern "C"
