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
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stsc/stsc.h"

namespace {

constexpr int kGradCheckFailed = 9;

struct Failure {
  int code;
};

void Check(stsc_status status) {
  if (status == STSC_OK) return;
  std::fprintf(stderr, "stsc: %s: %s\n", stsc_status_name(status), stsc_last_error());
  throw Failure{static_cast<int>(status)};
}

void Usage(const std::string& message) {
  std::fprintf(stderr, "stsc: invalid-argument: %s\n", message.c_str());
  throw Failure{STSC_ERR_INVALID_ARGUMENT};
}

void PrintLine(const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

template <typename Fn>
std::string ReadString(Fn&& fn) {
  std::size_t needed = 0;
  Check(fn(nullptr, 0, &needed));
  std::string out(needed, '\0');
  Check(fn(out.data(), out.size(), &needed));
  out.resize(needed - 1);
  return out;
}

struct Config {
  stsc_config* handle = nullptr;
  Config() = default;
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;
  ~Config() { stsc_config_free(handle); }

  std::string Get(const char* key) const {
    return ReadString([&](char* b, std::size_t c, std::size_t* n) {
      return stsc_config_get(handle, key, b, c, n);
    });
  }
  std::string Render() const {
    return ReadString([&](char* b, std::size_t c, std::size_t* n) {
      return stsc_config_render(handle, b, c, n);
    });
  }
};

struct Dataset {
  stsc_dataset* handle = nullptr;
  ~Dataset() { stsc_dataset_free(handle); }
};

struct Network {
  stsc_network* handle = nullptr;
  ~Network() { stsc_network_free(handle); }
};

struct CommonOptions {
  std::string config_path;
  std::string dataset = "shd";
  std::vector<std::string> overrides;
  std::string seed;
  std::string data_dir;
  std::string out_dir;
};

void AddCommon(CLI::App* cmd, CommonOptions& o, bool data, bool out) {
  cmd->add_option("-c,--config", o.config_path, "key = value config file");
  cmd->add_option("--dataset", o.dataset, "defaults to use without a config file")
      ->check(CLI::IsMember({"shd", "nmnist", "cifar10dvs", "dvs128"}));
  cmd->add_option("-O,--override", o.overrides, "key=value, applied in order");
  cmd->add_option("--seed", o.seed, "random seed");
  if (data) cmd->add_option("--data", o.data_dir, "frame cache directory");
  if (out) cmd->add_option("-o,--out", o.out_dir, "output directory");
}

void BuildConfig(const CommonOptions& o, Config& config) {
  if (!o.config_path.empty())
    Check(stsc_config_load(o.config_path.c_str(), &config.handle));
  else
    Check(stsc_config_defaults(o.dataset.c_str(), &config.handle));
  if (!o.seed.empty()) Check(stsc_config_set(config.handle, "seed", o.seed.c_str()));
  for (const std::string& assignment : o.overrides)
    Check(stsc_config_override(config.handle, assignment.c_str()));
  Check(stsc_config_validate(config.handle));
}

void PrintEffectiveConfig(const Config& config) {
  std::printf("# effective config\n%s# end config\n", config.Render().c_str());
  std::fflush(stdout);
}

std::filesystem::path DataRoot(const char* what) {
  const char* root = std::getenv("STSC_DATA_ROOT");
  if (root == nullptr || *root == '\0')
    Usage(std::string("no ") + what + " given and STSC_DATA_ROOT is not set");
  return root;
}

std::string CacheDir(const CommonOptions& o, const Config& config) {
  if (!o.data_dir.empty()) return o.data_dir;
  return (DataRoot("--data") / "cache" / (config.Get("dataset") + "-T" + config.Get("T")))
      .string();
}

void OpenDataset(const CommonOptions& o, const Config& config, Dataset& dataset) {
  const std::string dir = CacheDir(o, config);
  Check(stsc_dataset_open(config.handle, dir.c_str(), &dataset.handle));
  std::size_t train = 0, test = 0;
  Check(stsc_dataset_size(dataset.handle, &train, &test));
  std::printf("data: %s (%zu train / %zu test)\n", dir.c_str(), train, test);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking networks with spatio-temporal synaptic connections"};
  app.require_subcommand(1);
  app.set_version_flag("--version", stsc_version());

  CommonOptions prep_opts, train_opts, eval_opts, ablate_opts, inspect_opts;

  std::string raw_dir;
  auto* prep = app.add_subcommand("prepare-data", "aggregate raw events into frame caches");
  AddCommon(prep, prep_opts, false, true);
  prep->add_option("--raw", raw_dir, "raw dataset directory (default $STSC_DATA_ROOT/<dataset>)");

  auto* train = app.add_subcommand("train", "train a network and record metrics");
  AddCommon(train, train_opts, true, true);

  std::string checkpoint;
  auto* eval = app.add_subcommand("eval", "test accuracy of a checkpoint");
  AddCommon(eval, eval_opts, true, false);
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();

  std::size_t seeds = 20;
  bool inject_fault = false;
  std::string filter;
  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  grad->add_option("--seeds", seeds, "random cases per check")->check(CLI::PositiveNumber);
  grad->add_flag("--inject-fault", inject_fault, "add a deliberately wrong backward");
  grad->add_option("--filter", filter, "only checks whose name contains this");

  std::string grid;
  auto* ablate = app.add_subcommand("ablate", "one training run per grid point");
  AddCommon(ablate, ablate_opts, true, true);
  ablate->add_option("--grid", grid, "policies | kf | kg | variants | modules | field=v1,v2;...")
      ->required();

  std::string spec;
  auto* inspect = app.add_subcommand("inspect", "print a parsed network");
  AddCommon(inspect, inspect_opts, false, false);
  inspect->add_option("--spec", spec, "network string (default: the config's)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*prep) {
      Config config;
      BuildConfig(prep_opts, config);
      PrintEffectiveConfig(config);
      const std::string dataset = config.Get("dataset");
      if (raw_dir.empty()) raw_dir = (DataRoot("--raw") / dataset).string();
      const std::string out = prep_opts.out_dir.empty() ? CacheDir(prep_opts, config)
                                                        : prep_opts.out_dir;
      stsc_prepare_summary summary{};
      Check(stsc_prepare_data(config.handle, raw_dir.c_str(), out.c_str(), PrintLine, nullptr,
                              &summary));
    } else if (*train) {
      Config config;
      BuildConfig(train_opts, config);
      PrintEffectiveConfig(config);
      Dataset dataset;
      OpenDataset(train_opts, config, dataset);
      const std::string out = train_opts.out_dir.empty()
                                  ? "runs/" + config.Get("dataset") + "-seed" + config.Get("seed")
                                  : train_opts.out_dir;
      stsc_train_summary summary{};
      Check(stsc_train(config.handle, dataset.handle, out.c_str(), PrintLine, nullptr,
                       &summary));
      std::printf("best test accuracy %.4f (epoch %zu), final %.4f; results in %s\n",
                  summary.best_test_acc, summary.best_epoch, summary.final_test_acc,
                  out.c_str());
    } else if (*eval) {
      Config config;
      BuildConfig(eval_opts, config);
      PrintEffectiveConfig(config);
      Dataset dataset;
      OpenDataset(eval_opts, config, dataset);
      Network network;
      Check(stsc_network_create(config.handle, &network.handle));
      Check(stsc_network_load(network.handle, checkpoint.c_str()));
      double accuracy = 0.0;
      const std::string batch = config.Get("batch_size");
      Check(stsc_network_evaluate(network.handle, dataset.handle, std::stoul(batch),
                                  &accuracy));
      std::printf("test accuracy %.17g\n", accuracy);
    } else if (*grad) {
      int passed = 0;
      Check(stsc_gradcheck(seeds, inject_fault ? 1 : 0, filter.c_str(), PrintLine, nullptr,
                           &passed));
      return passed ? 0 : kGradCheckFailed;
    } else if (*ablate) {
      Config config;
      BuildConfig(ablate_opts, config);
      PrintEffectiveConfig(config);
      Dataset dataset;
      OpenDataset(ablate_opts, config, dataset);
      const std::string out =
          ablate_opts.out_dir.empty() ? "runs/ablate-" + grid : ablate_opts.out_dir;
      std::size_t rows = 0;
      Check(stsc_ablate(config.handle, grid.c_str(), dataset.handle, out.c_str(), PrintLine,
                        nullptr, &rows));
      std::printf("%zu rows written to %s/ablation.csv\n", rows, out.c_str());
    } else if (*inspect) {
      Config config;
      BuildConfig(inspect_opts, config);
      if (!spec.empty()) Check(stsc_config_set(config.handle, "spec", spec.c_str()));
      Check(stsc_config_validate(config.handle));
      PrintEffectiveConfig(config);
      Network network;
      Check(stsc_network_create(config.handle, &network.handle));
      std::printf("%s", ReadString([&](char* b, std::size_t c, std::size_t* n) {
                          return stsc_network_describe(network.handle, b, c, n);
                        }).c_str());
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
