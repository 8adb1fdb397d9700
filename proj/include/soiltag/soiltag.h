/* soiltag: chipless Wi-Fi tag soil-moisture sensing simulator.
 *
 * C interface to the simulation core. All functions return a status
 * code; soiltag_last_error() describes the most recent failure on the
 * calling thread. Heap results are released with the matching _free
 * function.
 */
#ifndef SOILTAG_H
#define SOILTAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOILTAG_API __declspec(dllexport)
#else
#define SOILTAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum soiltag_status {
  SOILTAG_OK = 0,
  SOILTAG_ERR_INVALID = 1,    /* bad argument, config or file content */
  SOILTAG_ERR_DOMAIN = 2,     /* input outside an operation's domain */
  SOILTAG_ERR_SHAPE = 3,      /* dimension mismatch */
  SOILTAG_ERR_INFEASIBLE = 4, /* search/estimation has no solution */
  SOILTAG_ERR_IO = 5,
  SOILTAG_ERR_INTERNAL = 6
} soiltag_status;

SOILTAG_API const char* soiltag_version(void);

/* Message for the last error on this thread; empty string if none. */
SOILTAG_API const char* soiltag_last_error(void);

/* ---- soil model ---- */

SOILTAG_API int soiltag_topp_permittivity(double theta, double* out_epsilon);
SOILTAG_API int soiltag_vwc_to_gwc(double vwc, double bulk_density, double* out_gwc);

/* ---- resonator circuit ---- */

typedef struct soiltag_circuit {
  double z_line_ohm;
  double z_source_ohm;
  double c1_farad;
  double cc_farad;
  double lc_henry;
  double r_loss_ohm;
} soiltag_circuit;

/* Lumped parameters for a slot of width w_mm / length a_mm loaded by
 * soil of the given relative permittivity. */
SOILTAG_API int soiltag_circuit_from_geometry(double w_mm, double a_mm,
                                              double epsilon_soil,
                                              soiltag_circuit* out_circuit);

SOILTAG_API int soiltag_resonant_frequency(const soiltag_circuit* circuit,
                                           double* out_hz);

/* Gain in dB at each frequency; out_gain_db must hold count doubles. */
SOILTAG_API int soiltag_frequency_response(const soiltag_circuit* circuit,
                                           const double* freqs_hz, size_t count,
                                           double* out_gain_db);

/* ---- features and estimators ---- */

SOILTAG_API int soiltag_filter_gain(double amplitude, double reference,
                                    double* out_db);

SOILTAG_API int soiltag_dtw_distance(const double* x, size_t x_len, const double* y,
                                     size_t y_len, double* out_cost);

typedef struct soiltag_forest soiltag_forest; /* opaque */

/* Train on row-major features[n_rows][n_features] with labels in moisture
 * percent. hyperparams_json may be NULL or a JSON object with any of
 * n_trees, max_depth, min_leaf, features_per_split. */
SOILTAG_API int soiltag_forest_train(const double* features, const double* labels,
                                     size_t n_rows, size_t n_features,
                                     const char* hyperparams_json, uint64_t seed,
                                     soiltag_forest** out_forest);

SOILTAG_API int soiltag_forest_predict(const soiltag_forest* forest,
                                       const double* features, size_t n_features,
                                       double* out_prediction);

/* Serialized model; free with soiltag_string_free. */
SOILTAG_API int soiltag_forest_to_json(const soiltag_forest* forest, char** out_json);
SOILTAG_API int soiltag_forest_from_json(const char* json, soiltag_forest** out_forest);
SOILTAG_API void soiltag_forest_free(soiltag_forest* forest);

/* ---- command runner ---- */

/* Execute one pipeline command (design, align, dataset, features, train,
 * predict, eval, e2e, sweep) with a JSON config. Artifacts are written
 * under out_dir; the summary report is returned as JSON in *out_report
 * (free with soiltag_string_free). */
SOILTAG_API int soiltag_run(const char* command, const char* config_json,
                            const char* out_dir, uint64_t seed, char** out_report);

SOILTAG_API void soiltag_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SOILTAG_H */
