// Copyright 2026 The stsc-snn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef STSC_STSC_H_
#define STSC_STSC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define STSC_API __declspec(dllexport)
#else
#define STSC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stsc_status {
  STSC_OK = 0,
  STSC_ERR_INVALID_ARGUMENT = 1,
  STSC_ERR_IO = 2,
  STSC_ERR_CORRUPT_INPUT = 3,
  STSC_ERR_SPEC = 4,
  STSC_ERR_NUMERIC = 5,
  STSC_ERR_STATE = 6,
  STSC_ERR_UNSUPPORTED = 7,
  STSC_ERR_INTERNAL = 8,
} stsc_status;

// Message of the last failed call on the calling thread ("" if none).
STSC_API const char* stsc_last_error(void);
STSC_API const char* stsc_status_name(stsc_status status);
STSC_API const char* stsc_version(void);

// Receives one line of progress output (no trailing newline).
typedef void (*stsc_log_fn)(const char* line, void* user);

// String results are copied into buf. *needed receives the size including
// the terminating NUL; pass buf = NULL to query it. A non-NULL buffer that is
// too small yields STSC_ERR_INVALID_ARGUMENT.

// --- configuration ----------------------------------------------------------

typedef struct stsc_config stsc_config;

// dataset: shd, nmnist, cifar10dvs or dvs128.
STSC_API stsc_status stsc_config_defaults(const char* dataset, stsc_config** out);
STSC_API stsc_status stsc_config_load(const char* path, stsc_config** out);
STSC_API stsc_status stsc_config_clone(const stsc_config* config, stsc_config** out);
STSC_API stsc_status stsc_config_set(stsc_config* config, const char* key, const char* value);
// assignment: "key=value"
STSC_API stsc_status stsc_config_override(stsc_config* config, const char* assignment);
STSC_API stsc_status stsc_config_get(const stsc_config* config, const char* key, char* buf,
                                     size_t capacity, size_t* needed);
// Every field as "key = value" lines; loadable with stsc_config_load.
STSC_API stsc_status stsc_config_render(const stsc_config* config, char* buf,
                                        size_t capacity, size_t* needed);
STSC_API stsc_status stsc_config_validate(const stsc_config* config);
STSC_API void stsc_config_free(stsc_config* config);

// --- data -------------------------------------------------------------------

typedef struct stsc_prepare_summary {
  int up_to_date;
  size_t train_samples;
  size_t test_samples;
} stsc_prepare_summary;

// Aggregates raw events into frame caches under out_dir using the config's
// dataset, T, fixed_duration_us, train_limit and test_limit. A no-op when the
// cache already matches.
STSC_API stsc_status stsc_prepare_data(const stsc_config* config, const char* raw_dir,
                                       const char* out_dir, stsc_log_fn log, void* user,
                                       stsc_prepare_summary* summary);

typedef struct stsc_dataset stsc_dataset;

STSC_API stsc_status stsc_dataset_open(const stsc_config* config, const char* cache_dir,
                                       stsc_dataset** out);
STSC_API stsc_status stsc_dataset_size(const stsc_dataset* dataset, size_t* train,
                                       size_t* test);
STSC_API void stsc_dataset_free(stsc_dataset* dataset);

// --- network ----------------------------------------------------------------

typedef struct stsc_network stsc_network;

STSC_API stsc_status stsc_network_create(const stsc_config* config, stsc_network** out);
STSC_API stsc_status stsc_network_describe(const stsc_network* network, char* buf,
                                           size_t capacity, size_t* needed);
STSC_API stsc_status stsc_network_parameter_count(const stsc_network* network,
                                                  size_t* count);
STSC_API stsc_status stsc_network_load(stsc_network* network, const char* checkpoint);
STSC_API stsc_status stsc_network_save(const stsc_network* network, const char* checkpoint);
// Test-split accuracy in [0, 1].
STSC_API stsc_status stsc_network_evaluate(stsc_network* network, const stsc_dataset* dataset,
                                           size_t batch_size, double* accuracy);
STSC_API void stsc_network_free(stsc_network* network);

// --- training ---------------------------------------------------------------

typedef struct stsc_train_summary {
  size_t epochs;
  size_t best_epoch;
  double best_test_acc;
  double final_test_acc;
} stsc_train_summary;

// Writes config.txt, metrics.csv, best.ckpt, final.ckpt and summary.json.
STSC_API stsc_status stsc_train(const stsc_config* config, const stsc_dataset* dataset,
                                const char* out_dir, stsc_log_fn log, void* user,
                                stsc_train_summary* summary);

// grid: policies, kf, kg, variants, modules, or "field=v1,v2;..." over
// policy, K_F, K_G, variant, modules. Writes out_dir/ablation.csv.
STSC_API stsc_status stsc_ablate(const stsc_config* config, const char* grid,
                                 const stsc_dataset* dataset, const char* out_dir,
                                 stsc_log_fn log, void* user, size_t* rows);

// Runs the finite-difference suite; one log line per check. *passed is 1 when
// every check is under tolerance.
STSC_API stsc_status stsc_gradcheck(size_t seeds, int inject_fault, const char* filter,
                                    stsc_log_fn log, void* user, int* passed);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // STSC_STSC_H_
