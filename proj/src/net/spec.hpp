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

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "synapse/stsc.hpp"

namespace stsc::net {

enum class LayerKind { kFullyConnected, kConv, kMaxPool, kAvgPool, kDropout };

struct LayerSpec {
  LayerKind kind = LayerKind::kFullyConnected;
  std::size_t width = 0;   // output features (nFC) or channels (xCy)
  std::size_t kernel = 0;  // conv kernel size
  double drop = 0.0;       // dropout probability
  std::string token;

  bool IsSpatialOp() const {
    return kind == LayerKind::kFullyConnected || kind == LayerKind::kConv;
  }
};

enum class NeuronMode { kLif, kRelu, kNone };

const char* NeuronModeName(NeuronMode mode);

// Parsed architecture string such as "Input-128FC-128FC-100FC-Voting-20",
// plus the STSC insertion points and the neuron placed after each spatial op.
struct NetworkSpec {
  std::string text;
  std::vector<LayerSpec> layers;
  std::size_t classes = 0;
  std::vector<NeuronMode> neuron_modes;  // one per spatial op, in order
  std::set<std::size_t> stsc_points;     // 1-based spatial-op indices
  synapse::StscConfig stsc;

  std::size_t SpatialOpCount() const;
  bool HasConv() const;
};

// Throws spec-error on unknown tokens, a missing or repeated Voting token, or
// a class count that does not divide the last FC width.
NetworkSpec ParseSpec(std::string_view text);

// "none", or "P" followed by 1-based spatial-op digits: P1, P13, P123, ...
std::set<std::size_t> ParsePolicy(std::string_view policy, std::size_t spatial_ops);
std::string PolicyName(const std::set<std::size_t>& points);

// The seven insertion policies of the three-layer FC network.
const std::vector<std::string>& FcInsertionPolicies();

enum class AblationKind { kFcsNone, kFcsRelu, kSnn };

AblationKind ParseAblationKind(std::string_view name);
const char* AblationKindName(AblationKind kind);

// FCs-Non: no neuron anywhere. FCs-ReLU: ReLU after all FC layers but the last.
// SNN: LIF after every FC layer. Conv specs are unsupported.
NetworkSpec AblationVariant(NetworkSpec spec, AblationKind kind);

}  // namespace stsc::net
