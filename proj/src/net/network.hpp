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
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "diff/checkpoint.hpp"
#include "diff/ops.hpp"
#include "net/spec.hpp"
#include "neuron/lif.hpp"
#include "synapse/stsc.hpp"

namespace stsc::net {

struct NetworkOptions {
  neuron::LifConfig lif;
  bool bias = true;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;
};

enum class Mode { kTrain, kEval };

// Per-forward scratch: dropout randomness and the batch-norm statistics to be
// folded into running statistics once the step is committed.
struct ForwardContext {
  explicit ForwardContext(std::uint64_t seed) : rng(seed) {}

  std::mt19937_64 rng;
  std::vector<std::pair<std::size_t, diff::BatchNormStats>> bn_updates;
};

// [C, L] constant averaging matrix: row i is 1/(L/C) over output group i.
diff::Tensor VotingMatrix(std::size_t classes, std::size_t outputs);

// Sequential network over [T, B, ...] activations. Weights are stored once and
// shared by every timestep.
class Network {
 public:
  // sample_shape excludes time and batch: {700} or {2, 34, 34}.
  Network(NetworkSpec spec, diff::Shape sample_shape, NetworkOptions options,
          std::uint64_t seed);
  ~Network();
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;

  // input [T, B, sample...] -> pre-voting outputs O [T, B, L_out].
  diff::Var Forward(diff::Tape& tape, const diff::Tensor& input, Mode mode,
                    ForwardContext& context);

  // Folds recorded batch statistics into the running statistics, in order.
  void ApplyBatchNormUpdates(const ForwardContext& context);

  std::vector<diff::Parameter*> Parameters();
  std::size_t ParameterCount() const;

  // Trainable parameters plus batch-norm running statistics.
  std::vector<diff::NamedTensor> StateDict() const;
  void LoadStateDict(const std::vector<diff::NamedTensor>& state);

  const NetworkSpec& spec() const { return spec_; }
  const diff::Shape& sample_shape() const { return sample_shape_; }
  std::size_t output_width() const { return output_width_; }
  std::size_t classes() const { return spec_.classes; }
  std::size_t stsc_block_count() const;

  // Layer-by-layer listing with parameter counts and STSC placements.
  std::string Describe() const;

 private:
  struct Stage;

  NetworkSpec spec_;
  diff::Shape sample_shape_;
  NetworkOptions options_;
  std::vector<std::unique_ptr<Stage>> stages_;
  std::size_t output_width_ = 0;
};

}  // namespace stsc::net
