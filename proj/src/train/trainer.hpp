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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "events/frame_cache.hpp"
#include "net/network.hpp"
#include "train/config.hpp"

namespace stsc::train {

using LogFn = std::function<void(const std::string&)>;

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;
  double best_test_acc = 0.0;
  double final_test_acc = 0.0;
};

struct TrainData {
  events::FrameDataset train;
  events::FrameDataset test;
};

// Reads the frame caches written by prepare-data and applies the config's
// sample limits. Checks the cached T against the config.
TrainData LoadTrainData(const TrainConfig& config, const std::filesystem::path& data_dir);

// Keeps limit samples at evenly spaced positions (all when limit is 0).
events::FrameDataset Subsample(const events::FrameDataset& data, std::size_t limit);

net::Network BuildNetwork(const TrainConfig& config, const diff::Shape& sample_shape);

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
  std::vector<int> predictions;
};

EvalResult Evaluate(net::Network& network, const events::FrameDataset& data,
                    std::size_t batch_size);

// Evaluates on the parameters as stored in a checkpoint (32-bit rounded),
// restoring the full-precision state afterwards.
EvalResult EvaluateSnapshot(net::Network& network, const events::FrameDataset& data,
                            std::size_t batch_size);

// Writes config.txt, metrics.csv, best.ckpt, final.ckpt and summary.json
// into out_dir (when non-empty).
TrainResult Train(const TrainConfig& config, const TrainData& data,
                  const std::filesystem::path& out_dir, const LogFn& log = {});

std::string MetricsCsv(const std::vector<EpochMetrics>& history);

// Mixes a seed with stream coordinates.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0);

}  // namespace stsc::train
