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

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "diff/ops.hpp"
#include "diff/tape.hpp"

// Spatio-temporal synaptic connection: a temporal response filter (TRF, a
// per-channel temporal convolution) multiplied element-wise by a feedforward
// lateral inhibition gate (FLI, a sigmoid attention factor in (0, 1)).
namespace stsc::synapse {

enum class Variant {
  kDense1d,  // input [T, ..., N]
  kConv3d,   // input [T, ..., C, H, W]; gate computed per channel
};

struct StscConfig {
  std::size_t trf_kernel = 5;  // K_F, odd
  std::size_t fli_kernel = 3;  // K_G, odd
  std::size_t reduction = 1;   // r; hidden width M = ceil(N / r)
  Variant variant = Variant::kDense1d;
  bool enable_trf = true;
  bool enable_fli = true;
  diff::TemporalPadding padding = diff::TemporalPadding::kSymmetric;

  void Validate() const;
};

std::size_t ReducedWidth(std::size_t channels, std::size_t reduction);

// C = f(X). kernel [K_F, channels].
diff::Var TrfForward(diff::Tape& tape, diff::Var x, diff::Var kernel, Variant variant,
                     diff::TemporalPadding padding = diff::TemporalPadding::kSymmetric);

// D = g(X). mix [K_G, N, M], expand [M, N].
//   S = tconv1d_mix(X, mix); D = sigmoid(relu(S) . expand)
// The 3-D variant averages each channel plane first and broadcasts the
// per-channel gate back over the plane.
diff::Var FliForward(diff::Tape& tape, diff::Var x, diff::Var mix, diff::Var expand,
                     Variant variant,
                     diff::TemporalPadding padding = diff::TemporalPadding::kSymmetric);

// Trainable STSC instance for a fixed channel count.
class StscBlock {
 public:
  // channels is N for the dense variant and C for the conv variant. Parameter
  // names are "<prefix>.trf.W_F", "<prefix>.fli.W_G1", "<prefix>.fli.W_G2".
  StscBlock(std::string prefix, std::size_t channels, StscConfig config,
            std::mt19937_64& rng);

  // Y = C (.) D; a disabled path contributes the identity (C = X or D = 1).
  diff::Var Forward(diff::Tape& tape, diff::Var x);

  std::vector<diff::Parameter*> Parameters();
  std::size_t ParameterCount() const;
  const StscConfig& config() const { return config_; }
  std::size_t channels() const { return channels_; }
  std::size_t hidden() const { return hidden_; }

  diff::Parameter* trf_kernel() { return trf_kernel_ ? &*trf_kernel_ : nullptr; }
  diff::Parameter* fli_mix() { return fli_mix_ ? &*fli_mix_ : nullptr; }
  diff::Parameter* fli_expand() { return fli_expand_ ? &*fli_expand_ : nullptr; }

 private:
  StscConfig config_;
  std::size_t channels_;
  std::size_t hidden_;
  std::optional<diff::Parameter> trf_kernel_;
  std::optional<diff::Parameter> fli_mix_;
  std::optional<diff::Parameter> fli_expand_;
};

}  // namespace stsc::synapse
