/* Copyright 2026 The hybridtess Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to hybridtess: geohash and Voronoi tessellations, K-Means
 * hot spots, demand forecasting metrics, the discounted HEDGE combiner and
 * the end-to-end experiment pipeline.
 *
 * Every function returns an ht_status. On failure, ht_last_error() returns
 * a message for the calling thread until its next failing call. Handles are
 * opaque and are released with the matching *_free function; passing NULL to
 * a *_free function is a no-op.
 */
#ifndef HYBRIDTESS_HYBRIDTESS_H
#define HYBRIDTESS_HYBRIDTESS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(HYBRIDTESS_BUILDING_LIBRARY)
#define HT_API __declspec(dllexport)
#else
#define HT_API __declspec(dllimport)
#endif
#else
#define HT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ht_status {
    HT_OK = 0,
    HT_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad index, short buffer */
    HT_ERR_DOMAIN = 2,
    HT_ERR_PARSE = 3,
    HT_ERR_UNDEFINED_METRIC = 4,
    HT_ERR_IO = 5,
    HT_ERR_CONFIG = 6,
    HT_ERR_DATA = 7,
    HT_ERR_NUMERIC = 8,
    HT_ERR_INTERNAL = 9
} ht_status;

HT_API const char* ht_last_error(void);
HT_API const char* ht_status_name(ht_status status);
HT_API const char* ht_version(void);

/* ------------------------------------------------------------ geohash */

/* Writes a NUL-terminated code of `level` characters (1..12); `capacity`
 * must be at least level + 1. */
HT_API ht_status ht_geohash_encode(double lat, double lon, int level, char* out, size_t capacity);
/* bounds = {lat_min, lat_max, lon_min, lon_max} */
HT_API ht_status ht_geohash_decode(const char* code, double bounds[4]);
HT_API ht_status ht_geohash_cell_area_km2(const char* code, double* area);

/* ------------------------------------------------------------ k-means */

typedef struct ht_kmeans ht_kmeans;

HT_API ht_status ht_kmeans_fit(const double* lat, const double* lon, size_t n, size_t k, uint64_t seed,
                               int max_iter, double tol, ht_kmeans** out);
HT_API void ht_kmeans_free(ht_kmeans* model);
HT_API size_t ht_kmeans_k(const ht_kmeans* model);
HT_API ht_status ht_kmeans_centroid(const ht_kmeans* model, size_t i, double* lat, double* lon);
/* Cluster of input point i. */
HT_API ht_status ht_kmeans_assignment(const ht_kmeans* model, size_t i, size_t* cluster);
HT_API ht_status ht_kmeans_density(const ht_kmeans* model, size_t i, size_t* count);
/* Final objective in km^2. */
HT_API double ht_kmeans_objective(const ht_kmeans* model);
HT_API size_t ht_kmeans_iterations(const ht_kmeans* model);
/* Objective after each assignment step; copies min(capacity, length) values
 * and always stores the full length. */
HT_API ht_status ht_kmeans_objective_trace(const ht_kmeans* model, double* out, size_t capacity, size_t* length);

/* ------------------------------------------------------------ voronoi */

typedef struct ht_voronoi ht_voronoi;

/* bounds = {lat_min, lat_max, lon_min, lon_max}; every seed must lie strictly
 * inside. The planar projection is centred on the mean seed. */
HT_API ht_status ht_voronoi_build(const double* lat, const double* lon, size_t n, const double bounds[4],
                                  ht_voronoi** out);
/* Diagram of the model's centroids in the model's own projection. */
HT_API ht_status ht_voronoi_from_kmeans(const ht_kmeans* model, const double bounds[4], ht_voronoi** out);
HT_API void ht_voronoi_free(ht_voronoi* diagram);
HT_API size_t ht_voronoi_size(const ht_voronoi* diagram);
HT_API ht_status ht_voronoi_locate(const ht_voronoi* diagram, double lat, double lon, size_t* cell);
HT_API ht_status ht_voronoi_cell_area_km2(const ht_voronoi* diagram, size_t i, double* area);
HT_API double ht_voronoi_bounds_area_km2(const ht_voronoi* diagram);
/* Cell polygon vertices in projected km, counter-clockwise. */
HT_API ht_status ht_voronoi_cell_vertices(const ht_voronoi* diagram, size_t i, double* x_km, double* y_km,
                                          size_t capacity, size_t* count);
HT_API ht_status ht_voronoi_write_csv(const ht_voronoi* diagram, const char* path);

/* ------------------------------------------------------------ metrics */

HT_API ht_status ht_smape(const double* actual, const double* forecast, size_t n, double* out);
HT_API ht_status ht_mase(const double* actual, const double* forecast, size_t n, const double* training,
                         size_t n_training, size_t season, double* out);
HT_API ht_status ht_ljung_box(const double* x, size_t n, size_t max_lag, double* q, double* p_value);
HT_API ht_status ht_ks_two_sample(const double* a, size_t na, const double* b, size_t nb, double* d,
                                  double* p_value);

/* ------------------------------------------------------------ hedge */

typedef struct ht_hedge ht_hedge;

HT_API ht_status ht_hedge_create(size_t experts, double beta, double gamma, ht_hedge** out);
HT_API void ht_hedge_free(ht_hedge* hedge);
/* Chooses an expert from the current weights, then updates them with
 * `errors` (one per expert). */
HT_API ht_status ht_hedge_step(ht_hedge* hedge, const double* errors, size_t* chosen);
HT_API ht_status ht_hedge_weights(const ht_hedge* hedge, double* out, size_t capacity);
/* `streams` holds `experts` rows of `length` values, row-major. Ties prefer
 * the smaller gamma, then the smaller beta. */
HT_API ht_status ht_hedge_tune(const double* streams, size_t experts, size_t length, const double* beta_grid,
                               size_t n_beta, const double* gamma_grid, size_t n_gamma, double* beta,
                               double* gamma, double* mean_error);

/* ------------------------------------------------------------ experiment */

typedef struct ht_config ht_config;
typedef struct ht_report ht_report;

HT_API ht_status ht_config_create(ht_config** out);
HT_API void ht_config_free(ht_config* config);
/* key=value file, '#' comments. */
HT_API ht_status ht_config_load_file(ht_config* config, const char* path);
HT_API ht_status ht_config_set(ht_config* config, const char* key, const char* value);
HT_API ht_status ht_config_validate(const ht_config* config);
HT_API ht_status ht_config_get(const ht_config* config, const char* key, char* out, size_t capacity);

/* Synthetic events (user_id,timestamp_iso8601,lat,lon) to `path`. */
HT_API ht_status ht_synth(const ht_config* config, const char* path, size_t* events);
/* Reads the configured input (or the synthetic city) and writes the events
 * that pass validation to `path` in the synthetic schema. */
HT_API ht_status ht_ingest(const ht_config* config, const char* path, size_t* kept, size_t* malformed,
                           size_t* out_of_bounds);
/* centroids.csv and voronoi.csv into `dir`. */
HT_API ht_status ht_tessellate(const ht_config* config, const char* dir);
/* per_cell.csv and expert_errors.csv into `dir`. */
HT_API ht_status ht_forecast(const ht_config* config, const char* dir);
/* Reads an expert_errors.csv, tunes on its validation rows and runs on its
 * test rows; writes trace.csv (and trace_<p>min.csv for several periods)
 * and hedge.csv into `dir`. */
HT_API ht_status ht_hedge_file(const ht_config* config, const char* errors_csv, const char* dir);

/* Full pipeline. With a non-NULL `dir` the report files, bundle.json and on
 * failure a FAILED marker are written there. `out` may be NULL. */
HT_API ht_status ht_run(const ht_config* config, const char* dir, ht_report** out);
HT_API ht_status ht_report_load(const char* bundle_json, ht_report** out);
HT_API ht_status ht_report_write(const ht_report* report, const char* dir);
HT_API void ht_report_free(ht_report* report);
HT_API size_t ht_report_period_count(const ht_report* report);
HT_API ht_status ht_report_period(const ht_report* report, size_t i, int* period_minutes);
/* strategy is "voronoi", "geohash" or "hybrid". */
HT_API ht_status ht_report_mean_error(const ht_report* report, size_t period, const char* strategy,
                                      double* mean_error);
HT_API ht_status ht_report_hedge(const ht_report* report, size_t period, double* beta, double* gamma,
                                 size_t* switches, double* switches_per_day);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDTESS_HYBRIDTESS_H */
