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
#include "net/spec.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "common/error.hpp"

namespace stsc::net {

namespace {

std::vector<std::string> SplitTokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t dash = text.find('-', start);
    const std::size_t end = dash == std::string_view::npos ? text.size() : dash;
    std::string token(text.substr(start, end - start));
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    tokens.push_back(std::move(token));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return tokens;
}

std::size_t ParseCount(const std::string& digits, const std::string& token) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  STSC_CHECK(ec == std::errc() && ptr == digits.data() + digits.size() && value > 0,
             ErrorCode::kSpec, "bad count in token '{}'", token);
  return value;
}

}  // namespace

const char* NeuronModeName(NeuronMode mode) {
  switch (mode) {
    case NeuronMode::kLif: return "LIF";
    case NeuronMode::kRelu: return "ReLU";
    case NeuronMode::kNone: return "None";
  }
  return "?";
}

std::size_t NetworkSpec::SpatialOpCount() const {
  return static_cast<std::size_t>(
      std::count_if(layers.begin(), layers.end(), [](const LayerSpec& l) { return l.IsSpatialOp(); }));
}

bool NetworkSpec::HasConv() const {
  return std::any_of(layers.begin(), layers.end(),
                     [](const LayerSpec& l) { return l.kind == LayerKind::kConv; });
}

NetworkSpec ParseSpec(std::string_view text) {
  static const std::regex kFc(R"((\d+)FC)");
  static const std::regex kConv(R"((\d+)C(\d+))");
  static const std::regex kDrop(R"((\d*\.?\d+)DP)");

  NetworkSpec spec;
  spec.text = std::string(text);
  const std::vector<std::string> tokens = SplitTokens(text);
  STSC_CHECK(tokens.size() >= 3 && tokens.front() == "Input", ErrorCode::kSpec,
             "network spec must start with 'Input' and end with 'Voting-<classes>': '{}'",
             text);
  const auto voting = std::find(tokens.begin(), tokens.end(), "Voting");
  STSC_CHECK(voting != tokens.end(), ErrorCode::kSpec, "network spec has no Voting token: '{}'",
             text);
  STSC_CHECK(std::count(tokens.begin(), tokens.end(), "Voting") == 1, ErrorCode::kSpec,
             "network spec has more than one Voting token: '{}'", text);
  STSC_CHECK(voting + 2 == tokens.end(), ErrorCode::kSpec,
             "Voting must be followed by exactly one class count: '{}'", text);
  spec.classes = ParseCount(tokens.back(), tokens.back());

  for (auto it = tokens.begin() + 1; it != voting; ++it) {
    const std::string& token = *it;
    std::smatch m;
    LayerSpec layer;
    layer.token = token;
    if (std::regex_match(token, m, kFc)) {
      layer.kind = LayerKind::kFullyConnected;
      layer.width = ParseCount(m[1].str(), token);
    } else if (std::regex_match(token, m, kConv)) {
      layer.kind = LayerKind::kConv;
      layer.width = ParseCount(m[1].str(), token);
      layer.kernel = ParseCount(m[2].str(), token);
      STSC_CHECK(layer.kernel == 3, ErrorCode::kSpec,
                 "only 3x3 convolutions are supported, got '{}'", token);
    } else if (token == "MP2") {
      layer.kind = LayerKind::kMaxPool;
    } else if (token == "AP2") {
      layer.kind = LayerKind::kAvgPool;
    } else if (std::regex_match(token, m, kDrop)) {
      layer.kind = LayerKind::kDropout;
      layer.drop = std::stod(m[1].str());
      STSC_CHECK(layer.drop >= 0.0 && layer.drop < 1.0, ErrorCode::kSpec,
                 "dropout probability out of [0, 1) in '{}'", token);
    } else {
      Fail(ErrorCode::kSpec, "unknown token '{}' in network spec '{}'", token, text);
    }
    spec.layers.push_back(std::move(layer));
  }

  const auto last_spatial = std::find_if(spec.layers.rbegin(), spec.layers.rend(),
                                         [](const LayerSpec& l) { return l.IsSpatialOp(); });
  if (last_spatial != spec.layers.rend()) {
    STSC_CHECK(last_spatial->kind == LayerKind::kFullyConnected, ErrorCode::kSpec,
               "the layer before Voting must be an FC layer: '{}'", text);
    STSC_CHECK(last_spatial->width % spec.classes == 0, ErrorCode::kSpec,
               "voting width {} is not divisible by {} classes", last_spatial->width,
               spec.classes);
  }
  spec.neuron_modes.assign(spec.SpatialOpCount(), NeuronMode::kLif);
  return spec;
}

std::set<std::size_t> ParsePolicy(std::string_view policy, std::size_t spatial_ops) {
  std::set<std::size_t> points;
  if (policy == "none" || policy.empty()) return points;
  STSC_CHECK(policy.size() >= 2 && policy[0] == 'P', ErrorCode::kSpec,
             "insertion policy must be 'none' or P<digits>, got '{}'", policy);
  for (char c : policy.substr(1)) {
    STSC_CHECK(c >= '1' && c <= '9', ErrorCode::kSpec, "bad insertion policy '{}'", policy);
    const auto point = static_cast<std::size_t>(c - '0');
    STSC_CHECK(point <= spatial_ops, ErrorCode::kSpec,
               "policy '{}' names layer {} but the network has {} spatial layers", policy,
               point, spatial_ops);
    STSC_CHECK(points.insert(point).second, ErrorCode::kSpec,
               "policy '{}' repeats layer {}", policy, point);
  }
  return points;
}

std::string PolicyName(const std::set<std::size_t>& points) {
  if (points.empty()) return "none";
  std::string name = "P";
  for (std::size_t p : points) name += std::to_string(p);
  return name;
}

const std::vector<std::string>& FcInsertionPolicies() {
  static const std::vector<std::string> kPolicies = {"P1",  "P2",  "P3",  "P12",
                                                     "P13", "P23", "P123"};
  return kPolicies;
}

AblationKind ParseAblationKind(std::string_view name) {
  if (name == "fcs-non" || name == "FCs(Non)" || name == "FCs-Non") return AblationKind::kFcsNone;
  if (name == "fcs-relu" || name == "FCs(ReLU)" || name == "FCs-ReLU") return AblationKind::kFcsRelu;
  if (name == "snn" || name == "SNN") return AblationKind::kSnn;
  Fail(ErrorCode::kInvalidArgument, "unknown network variant '{}' (fcs-non, fcs-relu, snn)",
       name);
}

const char* AblationKindName(AblationKind kind) {
  switch (kind) {
    case AblationKind::kFcsNone: return "fcs-non";
    case AblationKind::kFcsRelu: return "fcs-relu";
    case AblationKind::kSnn: return "snn";
  }
  return "?";
}

NetworkSpec AblationVariant(NetworkSpec spec, AblationKind kind) {
  STSC_CHECK(!spec.HasConv(), ErrorCode::kUnsupported,
             "ablation variants apply to FC-only networks, not '{}'", spec.text);
  const std::size_t n = spec.SpatialOpCount();
  for (std::size_t i = 0; i < n; ++i) {
    switch (kind) {
      case AblationKind::kFcsNone: spec.neuron_modes[i] = NeuronMode::kNone; break;
      case AblationKind::kFcsRelu:
        spec.neuron_modes[i] = i + 1 < n ? NeuronMode::kRelu : NeuronMode::kNone;
        break;
      case AblationKind::kSnn: spec.neuron_modes[i] = NeuronMode::kLif; break;
    }
  }
  return spec;
}

}  // namespace stsc::net
