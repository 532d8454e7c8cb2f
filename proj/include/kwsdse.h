/*
 * Copyright 2026 The kwsdse Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the kwsdse library.
 *
 * Every fallible call returns a kd_status. On failure, kd_last_error() holds
 * a message for the calling thread until its next failing call. Strings
 * returned through char** are heap-allocated and released with
 * kd_string_free(). Handles are released with their matching *_free, which
 * accepts NULL.
 */

#ifndef KWSDSE_H_
#define KWSDSE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KWSDSE_BUILDING)
#    define KD_API __declspec(dllexport)
#  else
#    define KD_API __declspec(dllimport)
#  endif
#else
#  define KD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kd_status {
  KD_OK = 0,
  KD_ERR_INVALID_ARGUMENT = 1,
  KD_ERR_NON_INTEGER_CHANNELS = 2,
  KD_ERR_INVALID_SHAPE = 3,
  KD_ERR_NOT_HARDWARE_FRIENDLY = 4,
  KD_ERR_UNSUPPORTED_LAYER = 5,
  KD_ERR_NON_POSITIVE_ENERGY = 6,
  KD_ERR_TOO_FEW_POINTS = 7,
  KD_ERR_RANK_DEFICIENT = 8,
  KD_ERR_DENOMINATOR_VANISHES = 9,
  KD_ERR_POLE_AT_POINT = 10,
  KD_ERR_INFEASIBLE = 11,
  KD_ERR_SINGULAR_INVERSION = 12,
  KD_ERR_EMPTY_CONTOUR = 13,
  KD_ERR_EMPTY_SAMPLES = 14,
  KD_ERR_EMPTY_GRID = 15,
  KD_ERR_EMPTY_INPUT = 16,
  KD_ERR_MISSING_HEADER = 17,
  KD_ERR_BAD_NUMERIC = 18,
  KD_ERR_OUT_OF_RANGE = 19,
  KD_ERR_INCONSISTENT_ENERGY = 20,
  KD_ERR_IO = 21,
  KD_ERR_PARSE = 22,
  KD_ERR_MISSING_MODEL = 23,
  KD_ERR_INTERNAL = 99
} kd_status;

typedef enum kd_padding { KD_PADDING_SAME = 0, KD_PADDING_VALID = 1 } kd_padding;
typedef enum kd_pool_rounding { KD_POOL_FLOOR = 0, KD_POOL_CEIL = 1 } kd_pool_rounding;
typedef enum kd_format { KD_FORMAT_CSV = 0, KD_FORMAT_JSON = 1 } kd_format;

typedef struct kd_conventions {
  kd_padding padding;
  kd_pool_rounding pool_rounding;
  int count_biases;
} kd_conventions;

KD_API const char* kd_version(void);
KD_API const char* kd_status_name(kd_status status);
KD_API const char* kd_last_error(void);
KD_API void kd_string_free(char* s);
KD_API kd_conventions kd_default_conventions(void);

/* ---- samples ------------------------------------------------------------ */

typedef struct kd_accuracy_samples kd_accuracy_samples;
typedef struct kd_hw_samples kd_hw_samples;

KD_API kd_status kd_accuracy_samples_load(const char* path, kd_accuracy_samples** out);
KD_API size_t kd_accuracy_samples_count(const kd_accuracy_samples* samples);
KD_API kd_status kd_accuracy_samples_get(const kd_accuracy_samples* samples, size_t index,
                                         double* q, double* s, double* accuracy_pct);
KD_API void kd_accuracy_samples_free(kd_accuracy_samples* samples);

KD_API kd_status kd_hw_samples_load(const char* path, kd_hw_samples** out);
KD_API size_t kd_hw_samples_count(const kd_hw_samples* samples);
KD_API kd_status kd_hw_samples_get(const kd_hw_samples* samples, size_t index, double* q,
                                   double* s, double* power_w, double* latency_ms,
                                   double* energy_mj);
KD_API void kd_hw_samples_free(kd_hw_samples* samples);

/* ---- models ------------------------------------------------------------- */

typedef struct kd_fit_report {
  double rmse;
  int n_points;
  double max_abs_residual;
  double condition_indicator;
} kd_fit_report;

typedef struct kd_hw_fit_report {
  kd_fit_report power;
  kd_fit_report latency;
  kd_fit_report energy;
  /* Largest latency spread across q at equal s in the samples. */
  double latency_q_spread;
} kd_hw_fit_report;

typedef struct kd_models kd_models;

KD_API kd_status kd_models_new(kd_models** out);
/* Reads a model JSON file; its sections replace the handle's. */
KD_API kd_status kd_models_merge_json(kd_models* models, const char* path);
KD_API kd_status kd_models_to_json(const kd_models* models, char** out);
KD_API kd_status kd_models_fit_accuracy(kd_models* models, const kd_accuracy_samples* samples,
                                        int refine, kd_fit_report* report);
/* joint != 0 refines power and latency against measured energy afterwards. */
KD_API kd_status kd_models_fit_hw(kd_models* models, const kd_hw_samples* samples, int joint,
                                  kd_hw_fit_report* report);
KD_API void kd_models_free(kd_models* models);

typedef struct kd_prediction {
  double accuracy_pct;
  double power_w;
  double latency_ms;
  double energy_mj;
  int extrapolated;
  int energy_warning;
} kd_prediction;

KD_API kd_status kd_predict(const kd_models* models, double q, double s, kd_prediction* out);
KD_API kd_status kd_invert_scale(const kd_models* models, double q, double accuracy_pct,
                                 double* s_out);
KD_API kd_status kd_min_energy_at_accuracy(const kd_models* models, double accuracy_pct,
                                           int q_min, int q_max, int* q_out, double* s_out,
                                           double* energy_mj_out);

/* ---- network and accelerator -------------------------------------------- */

typedef struct kd_net_summary {
  int64_t total_macs;
  int64_t weight_count;
  int64_t model_size_bits;
  int64_t largest_fmap_bits;
  double c_comp;
  double c_size;
  double c_fmap;
  int64_t mac_quadratic;
  int64_t mac_linear;
} kd_net_summary;

/* text_out may be NULL. */
KD_API kd_status kd_analyze_net(double s, int q, const kd_conventions* conventions,
                                kd_net_summary* out, char** text_out);

typedef struct kd_accel_summary {
  int engines;
  int multipliers;
  int64_t total_cycles;
  int64_t first_layer_cycles;
  double latency_ms;
  int64_t bram36;
} kd_accel_summary;

KD_API kd_status kd_accel_report(double q, double s, double freq_hz,
                                 const kd_conventions* conventions, kd_accel_summary* out,
                                 char** text_out);

/* ---- exploration -------------------------------------------------------- */

typedef struct kd_explore_request {
  double target_accuracy_pct;
  int q_min;
  int q_max;
  double s_min;
  double s_max;
  double freq_hz;
} kd_explore_request;

typedef struct kd_candidate {
  int q;
  double s;
  int engines;
  int multipliers;
  double accuracy_pct;
  double power_w;
  double latency_ms;
  double energy_mj;
  int64_t model_size_bits;
  int64_t bram36;
  double gopj;
  int feasible;
  int extrapolated;
} kd_candidate;

typedef struct kd_exploration kd_exploration;

KD_API kd_explore_request kd_default_explore_request(void);
KD_API kd_status kd_explore(const kd_models* models, const kd_explore_request* request,
                            const kd_conventions* conventions, kd_exploration** out);
KD_API size_t kd_exploration_grid_size(const kd_exploration* ex);
KD_API size_t kd_exploration_feasible_count(const kd_exploration* ex);
KD_API size_t kd_exploration_pareto_count(const kd_exploration* ex);
/* Sets *found to 0 when no grid point meets the target. */
KD_API kd_status kd_exploration_chosen(const kd_exploration* ex, kd_candidate* out,
                                       int* found);
KD_API kd_status kd_exploration_write(const kd_exploration* ex, kd_format format,
                                      char** out);
KD_API void kd_exploration_free(kd_exploration* ex);

/* Levels without any feasible q are skipped and counted in *skipped. */
KD_API kd_status kd_render_contours_svg(const kd_models* models, const double* levels,
                                        size_t n_levels, int q_min, int q_max,
                                        double s_min, double s_max, char** svg_out,
                                        size_t* skipped);

#ifdef __cplusplus
}
#endif

#endif /* KWSDSE_H_ */
