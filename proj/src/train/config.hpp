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
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "net/network.hpp"

namespace stsc::train {

// Every field is addressable by its name in config files and overrides.
struct TrainConfig {
  std::string dataset = "shd";
  std::string spec = "Input-128FC-128FC-100FC-Voting-20";
  std::string policy = "P1";
  std::string variant = "snn";  // snn | fcs-relu | fcs-non
  std::size_t epochs = 200;
  std::size_t batch_size = 256;
  double learning_rate = 1e-4;
  std::size_t T = 15;
  double tau = 10.0;
  double v_th = 0.3;
  double surrogate_alpha = 2.0;
  bool fire_at_threshold = true;
  bool detach_reset = false;
  std::size_t K_F = 5;
  std::size_t K_G = 3;
  std::size_t r = 1;
  bool enable_trf = true;
  bool enable_fli = true;
  bool causal = false;
  bool bias = true;
  std::uint64_t seed = 0;
  std::string precision = "f64";
  std::size_t shards = 1;
  std::size_t train_limit = 0;  // 0 = whole split
  std::size_t test_limit = 0;
  std::int64_t fixed_duration_us = 0;  // 0 = per-sample duration
  bool log_wall_time = true;

  void Set(const std::string& key, const std::string& value);
  std::string Get(const std::string& key) const;
  void Validate() const;

  // "key = value" lines for every field, in a fixed order.
  std::string Render() const;
};

const std::vector<std::string>& ConfigKeys();

// Defaults of the hyper-parameter table for one dataset: shd, nmnist,
// cifar10dvs or dvs128.
TrainConfig DefaultsFor(const std::string& dataset);

// Parses "key = value" lines; '#' starts a comment. A "dataset" key, if
// present, selects the defaults the other keys override.
TrainConfig LoadConfigFile(const std::filesystem::path& path);
TrainConfig ParseConfigText(const std::string& text, const std::string& source);

// "key=value"
void ApplyOverride(TrainConfig& config, const std::string& assignment);

net::NetworkSpec BuildSpec(const TrainConfig& config);
net::NetworkOptions BuildOptions(const TrainConfig& config);
diff::Shape SampleShapeFor(const std::string& dataset);

}  // namespace stsc::train
