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
#include "stsc/stsc.h"

#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "common/error.hpp"
#include "diff/checkpoint.hpp"
#include "events/frame_cache.hpp"
#include "train/ablate.hpp"
#include "train/config.hpp"
#include "train/gradcheck_suite.hpp"
#include "train/trainer.hpp"

struct stsc_config {
  stsc::train::TrainConfig value;
};

struct stsc_dataset {
  stsc::train::TrainData data;
};

struct stsc_network {
  stsc::train::TrainConfig config;
  stsc::net::Network network;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
stsc_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return STSC_OK;
  } catch (const stsc::Error& e) {
    g_last_error = e.what();
    return static_cast<stsc_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return STSC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return STSC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return STSC_ERR_INTERNAL;
  }
}

template <typename T>
void Require(const T* p, const char* what) {
  STSC_CHECK(p != nullptr, stsc::ErrorCode::kInvalidArgument, "{} must not be NULL", what);
}

void CopyOut(const std::string& text, char* buf, std::size_t capacity, std::size_t* needed) {
  if (needed != nullptr) *needed = text.size() + 1;
  if (buf == nullptr) return;
  STSC_CHECK(capacity >= text.size() + 1, stsc::ErrorCode::kInvalidArgument,
             "buffer of {} bytes is too small, {} needed", capacity, text.size() + 1);
  std::memcpy(buf, text.c_str(), text.size() + 1);
}

stsc::train::LogFn MakeLog(stsc_log_fn log, void* user) {
  if (log == nullptr) return {};
  return [log, user](const std::string& text) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) log(line.c_str(), user);
  };
}

}  // namespace

extern "C" {

const char* stsc_last_error(void) { return g_last_error.c_str(); }

const char* stsc_status_name(stsc_status status) {
  if (status == STSC_OK) return "ok";
  if (status == STSC_ERR_INTERNAL) return "internal-error";
  if (status >= STSC_ERR_INVALID_ARGUMENT && status <= STSC_ERR_UNSUPPORTED)
    return stsc::ErrorCodeName(static_cast<stsc::ErrorCode>(status));
  return "unknown-status";
}

const char* stsc_version(void) { return "0.1.0"; }

stsc_status stsc_config_defaults(const char* dataset, stsc_config** out) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(out, "out");
    *out = new stsc_config{stsc::train::DefaultsFor(dataset)};
  });
}

stsc_status stsc_config_load(const char* path, stsc_config** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new stsc_config{stsc::train::LoadConfigFile(path)};
  });
}

stsc_status stsc_config_clone(const stsc_config* config, stsc_config** out) {
  return Guard([&] {
    Require(config, "config");
    Require(out, "out");
    *out = new stsc_config{config->value};
  });
}

stsc_status stsc_config_set(stsc_config* config, const char* key, const char* value) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    config->value.Set(key, value);
  });
}

stsc_status stsc_config_override(stsc_config* config, const char* assignment) {
  return Guard([&] {
    Require(config, "config");
    Require(assignment, "assignment");
    stsc::train::ApplyOverride(config->value, assignment);
  });
}

stsc_status stsc_config_get(const stsc_config* config, const char* key, char* buf,
                            size_t capacity, size_t* needed) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    CopyOut(config->value.Get(key), buf, capacity, needed);
  });
}

stsc_status stsc_config_render(const stsc_config* config, char* buf, size_t capacity,
                               size_t* needed) {
  return Guard([&] {
    Require(config, "config");
    CopyOut(config->value.Render(), buf, capacity, needed);
  });
}

stsc_status stsc_config_validate(const stsc_config* config) {
  return Guard([&] {
    Require(config, "config");
    config->value.Validate();
    stsc::train::BuildSpec(config->value);
  });
}

void stsc_config_free(stsc_config* config) { delete config; }

stsc_status stsc_prepare_data(const stsc_config* config, const char* raw_dir,
                              const char* out_dir, stsc_log_fn log, void* user,
                              stsc_prepare_summary* summary) {
  return Guard([&] {
    Require(config, "config");
    Require(raw_dir, "raw_dir");
    Require(out_dir, "out_dir");
    const stsc::train::TrainConfig& c = config->value;
    stsc::events::PrepareOptions options;
    options.steps = c.T;
    if (c.fixed_duration_us > 0) options.load.fixed_duration_us = c.fixed_duration_us;
    options.train_limit = c.train_limit;
    options.test_limit = c.test_limit;
    const stsc::events::PrepareReport report = stsc::events::PrepareData(
        stsc::events::ParseDatasetKind(c.dataset), raw_dir, out_dir, options);
    if (auto emit = MakeLog(log, user)) {
      emit(report.up_to_date ? fmt::format("frame cache in {} is up to date", out_dir)
                             : fmt::format("wrote frame cache to {}", out_dir));
      for (const auto* split : {&report.train, &report.test}) {
        std::string histogram;
        for (const auto& [label, count] : split->label_histogram)
          histogram += fmt::format(" {}:{}", label, count);
        emit(fmt::format("{}: {} samples, shape {}, labels{}",
                         split == &report.train ? "train" : "test", split->samples,
                         stsc::diff::ShapeString(split->sample_shape), histogram));
      }
    }
    if (summary != nullptr)
      *summary = {report.up_to_date ? 1 : 0, report.train.samples, report.test.samples};
  });
}

stsc_status stsc_dataset_open(const stsc_config* config, const char* cache_dir,
                              stsc_dataset** out) {
  return Guard([&] {
    Require(config, "config");
    Require(cache_dir, "cache_dir");
    Require(out, "out");
    *out = new stsc_dataset{stsc::train::LoadTrainData(config->value, cache_dir)};
  });
}

stsc_status stsc_dataset_size(const stsc_dataset* dataset, size_t* train, size_t* test) {
  return Guard([&] {
    Require(dataset, "dataset");
    if (train != nullptr) *train = dataset->data.train.size();
    if (test != nullptr) *test = dataset->data.test.size();
  });
}

void stsc_dataset_free(stsc_dataset* dataset) { delete dataset; }

stsc_status stsc_network_create(const stsc_config* config, stsc_network** out) {
  return Guard([&] {
    Require(config, "config");
    Require(out, "out");
    const stsc::train::TrainConfig& c = config->value;
    *out = new stsc_network{
        c, stsc::train::BuildNetwork(c, stsc::train::SampleShapeFor(c.dataset))};
  });
}

stsc_status stsc_network_describe(const stsc_network* network, char* buf, size_t capacity,
                                  size_t* needed) {
  return Guard([&] {
    Require(network, "network");
    CopyOut(network->network.Describe(), buf, capacity, needed);
  });
}

stsc_status stsc_network_parameter_count(const stsc_network* network, size_t* count) {
  return Guard([&] {
    Require(network, "network");
    Require(count, "count");
    *count = network->network.ParameterCount();
  });
}

stsc_status stsc_network_load(stsc_network* network, const char* checkpoint) {
  return Guard([&] {
    Require(network, "network");
    Require(checkpoint, "checkpoint");
    network->network.LoadStateDict(stsc::diff::LoadCheckpoint(checkpoint));
  });
}

stsc_status stsc_network_save(const stsc_network* network, const char* checkpoint) {
  return Guard([&] {
    Require(network, "network");
    Require(checkpoint, "checkpoint");
    stsc::diff::SaveCheckpoint(checkpoint, network->network.StateDict());
  });
}

stsc_status stsc_network_evaluate(stsc_network* network, const stsc_dataset* dataset,
                                  size_t batch_size, double* accuracy) {
  return Guard([&] {
    Require(network, "network");
    Require(dataset, "dataset");
    Require(accuracy, "accuracy");
    *accuracy =
        stsc::train::Evaluate(network->network, dataset->data.test, batch_size).accuracy;
  });
}

void stsc_network_free(stsc_network* network) { delete network; }

stsc_status stsc_train(const stsc_config* config, const stsc_dataset* dataset,
                       const char* out_dir, stsc_log_fn log, void* user,
                       stsc_train_summary* summary) {
  return Guard([&] {
    Require(config, "config");
    Require(dataset, "dataset");
    const stsc::train::TrainResult result = stsc::train::Train(
        config->value, dataset->data, out_dir == nullptr ? "" : out_dir, MakeLog(log, user));
    if (summary != nullptr)
      *summary = {result.history.size(), result.best_epoch, result.best_test_acc,
                  result.final_test_acc};
  });
}

stsc_status stsc_ablate(const stsc_config* config, const char* grid,
                        const stsc_dataset* dataset, const char* out_dir, stsc_log_fn log,
                        void* user, size_t* rows) {
  return Guard([&] {
    Require(config, "config");
    Require(grid, "grid");
    Require(dataset, "dataset");
    const auto table =
        stsc::train::Ablate(config->value, stsc::train::ParseGrid(grid), dataset->data,
                            out_dir == nullptr ? "" : out_dir, MakeLog(log, user));
    if (rows != nullptr) *rows = table.size();
  });
}

stsc_status stsc_gradcheck(size_t seeds, int inject_fault, const char* filter,
                           stsc_log_fn log, void* user, int* passed) {
  return Guard([&] {
    stsc::train::GradCheckSuiteOptions options;
    options.seeds = seeds;
    options.inject_fault = inject_fault != 0;
    if (filter != nullptr) options.filter = filter;
    const stsc::train::GradCheckReport report = stsc::train::RunGradCheckSuite(options);
    if (auto emit = MakeLog(log, user)) emit(report.Render());
    if (passed != nullptr) *passed = report.passed() ? 1 : 0;
  });
}

}  // extern "C"
