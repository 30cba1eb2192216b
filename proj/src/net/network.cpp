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
#include "net/network.hpp"

#include <cmath>
#include <map>

#include "common/error.hpp"

namespace stsc::net {

using diff::NamedTensor;
using diff::Parameter;
using diff::Shape;
using diff::Tape;
using diff::Tensor;
using diff::Var;

Tensor VotingMatrix(std::size_t classes, std::size_t outputs) {
  STSC_CHECK(classes > 0 && outputs % classes == 0, ErrorCode::kSpec,
             "voting width {} is not divisible by {} classes", outputs, classes);
  const std::size_t group = outputs / classes;
  Tensor m({classes, outputs});
  for (std::size_t i = 0; i < classes; ++i)
    for (std::size_t j = i * group; j < (i + 1) * group; ++j)
      m.at({i, j}) = 1.0 / static_cast<double>(group);
  return m;
}

namespace {

enum class StageKind { kStsc, kLinear, kConv, kBatchNorm, kNeuron, kPool, kDropout };

Tensor UniformTensor(Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace

struct Network::Stage {
  StageKind kind;
  std::size_t layer = 0;  // 1-based spatial-op index this stage belongs to
  Shape in_shape;         // per-sample shape entering the stage
  Shape out_shape;

  std::unique_ptr<synapse::StscBlock> stsc;
  std::vector<Parameter> params;  // weight[, bias] or gamma, beta
  Tensor running_mean;
  Tensor running_variance;
  NeuronMode neuron = NeuronMode::kNone;
  diff::PoolKind pool = diff::PoolKind::kMax;
  double drop = 0.0;
};

Network::~Network() = default;
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

Network::Network(NetworkSpec spec, Shape sample_shape, NetworkOptions options,
                 std::uint64_t seed)
    : spec_(std::move(spec)), sample_shape_(std::move(sample_shape)), options_(options) {
  options_.lif.Validate();
  STSC_CHECK(!sample_shape_.empty() && diff::NumElements(sample_shape_) > 0,
             ErrorCode::kInvalidArgument, "network input shape must be non-empty");
  STSC_CHECK(spec_.neuron_modes.size() == spec_.SpatialOpCount(), ErrorCode::kSpec,
             "neuron modes ({}) do not match spatial layers ({})", spec_.neuron_modes.size(),
             spec_.SpatialOpCount());
  for (std::size_t p : spec_.stsc_points)
    STSC_CHECK(p >= 1 && p <= spec_.SpatialOpCount(), ErrorCode::kSpec,
               "STSC insertion point {} out of range", p);

  std::mt19937_64 rng(seed);
  Shape current = sample_shape_;
  std::size_t layer = 0;
  auto push = [&](std::unique_ptr<Stage> stage) {
    stage->layer = layer;
    stage->in_shape = current;
    if (stage->out_shape.empty()) stage->out_shape = current;
    current = stage->out_shape;
    stages_.push_back(std::move(stage));
  };

  for (const LayerSpec& spec_layer : spec_.layers) {
    if (spec_layer.IsSpatialOp()) {
      ++layer;
      const bool fc = spec_layer.kind == LayerKind::kFullyConnected;
      if (fc) current = {diff::NumElements(current)};
      STSC_CHECK(fc || current.size() == 3, ErrorCode::kSpec,
                 "'{}' needs a [C, H, W] input, got {}", spec_layer.token,
                 diff::ShapeString(current));
      if (spec_.stsc_points.contains(layer)) {
        auto stage = std::make_unique<Stage>();
        stage->kind = StageKind::kStsc;
        synapse::StscConfig cfg = spec_.stsc;
        cfg.variant = fc ? synapse::Variant::kDense1d : synapse::Variant::kConv3d;
        stage->stsc = std::make_unique<synapse::StscBlock>(
            fmt::format("stsc.{}", layer), current[0], cfg, rng);
        push(std::move(stage));
      }
      auto stage = std::make_unique<Stage>();
      if (fc) {
        const std::size_t in = current[0];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        stage->kind = StageKind::kLinear;
        stage->params.emplace_back(fmt::format("fc.{}.weight", layer),
                                   UniformTensor({in, spec_layer.width}, bound, rng));
        if (options_.bias)
          stage->params.emplace_back(fmt::format("fc.{}.bias", layer),
                                     UniformTensor({spec_layer.width}, bound, rng));
        stage->out_shape = {spec_layer.width};
        push(std::move(stage));
      } else {
        const std::size_t c_in = current[0];
        const double bound = 1.0 / std::sqrt(static_cast<double>(c_in * 9));
        stage->kind = StageKind::kConv;
        stage->params.emplace_back(fmt::format("conv.{}.weight", layer),
                                   UniformTensor({spec_layer.width, c_in, 3, 3}, bound, rng));
        if (options_.bias)
          stage->params.emplace_back(fmt::format("conv.{}.bias", layer),
                                     UniformTensor({spec_layer.width}, bound, rng));
        stage->out_shape = {spec_layer.width, current[1], current[2]};
        push(std::move(stage));

        auto bn = std::make_unique<Stage>();
        bn->kind = StageKind::kBatchNorm;
        bn->params.emplace_back(fmt::format("bn.{}.gamma", layer),
                                Tensor({spec_layer.width}, 1.0));
        bn->params.emplace_back(fmt::format("bn.{}.beta", layer), Tensor({spec_layer.width}));
        bn->running_mean = Tensor({spec_layer.width});
        bn->running_variance = Tensor({spec_layer.width}, 1.0);
        push(std::move(bn));
      }
      const NeuronMode mode = spec_.neuron_modes[layer - 1];
      if (mode != NeuronMode::kNone) {
        auto neuron = std::make_unique<Stage>();
        neuron->kind = StageKind::kNeuron;
        neuron->neuron = mode;
        push(std::move(neuron));
      }
      continue;
    }
    auto stage = std::make_unique<Stage>();
    if (spec_layer.kind == LayerKind::kDropout) {
      stage->kind = StageKind::kDropout;
      stage->drop = spec_layer.drop;
    } else {
      STSC_CHECK(current.size() == 3, ErrorCode::kSpec, "'{}' needs a [C, H, W] input, got {}",
                 spec_layer.token, diff::ShapeString(current));
      STSC_CHECK(current[1] >= 2 && current[2] >= 2, ErrorCode::kSpec,
                 "'{}' on a {}x{} plane", spec_layer.token, current[1], current[2]);
      stage->kind = StageKind::kPool;
      stage->pool = spec_layer.kind == LayerKind::kMaxPool ? diff::PoolKind::kMax
                                                            : diff::PoolKind::kAvg;
      stage->out_shape = {current[0], current[1] / 2, current[2] / 2};
    }
    push(std::move(stage));
  }
  output_width_ = diff::NumElements(current);
  STSC_CHECK(current.size() == 1 && output_width_ % spec_.classes == 0, ErrorCode::kSpec,
             "voting input {} is not a flat width divisible by {} classes",
             diff::ShapeString(current), spec_.classes);
}

Var Network::Forward(Tape& tape, const Tensor& input, Mode mode, ForwardContext& context) {
  STSC_CHECK(input.rank() == sample_shape_.size() + 2, ErrorCode::kInvalidArgument,
             "network input must be [T, B, {}], got {}",
             fmt::join(sample_shape_, ", "), diff::ShapeString(input.shape()));
  STSC_CHECK(Shape(input.shape().begin() + 2, input.shape().end()) == sample_shape_,
             ErrorCode::kInvalidArgument, "network input sample shape {} != {}",
             diff::ShapeString(Shape(input.shape().begin() + 2, input.shape().end())),
             diff::ShapeString(sample_shape_));
  const std::size_t steps = input.dim(0);
  const std::size_t batch = input.dim(1);
  const bool training = mode == Mode::kTrain;
  auto full = [steps, batch](const Shape& sample) {
    Shape s = {steps, batch};
    s.insert(s.end(), sample.begin(), sample.end());
    return s;
  };

  Var x = tape.Constant(input);
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    Stage& stage = *stages_[i];
    if (tape.Value(x).shape() != full(stage.in_shape))
      x = diff::Reshape(tape, x, full(stage.in_shape));
    switch (stage.kind) {
      case StageKind::kStsc:
        x = stage.stsc->Forward(tape, x);
        break;
      case StageKind::kLinear: {
        const Var bias = stage.params.size() > 1 ? tape.Bind(stage.params[1]) : Var{};
        x = diff::Linear(tape, x, tape.Bind(stage.params[0]), bias);
        break;
      }
      case StageKind::kConv: {
        const Shape& s = stage.in_shape;
        x = diff::Reshape(tape, x, {steps * batch, s[0], s[1], s[2]});
        const Var bias = stage.params.size() > 1 ? tape.Bind(stage.params[1]) : Var{};
        x = diff::Conv2d(tape, x, tape.Bind(stage.params[0]), bias);
        x = diff::Reshape(tape, x, full(stage.out_shape));
        break;
      }
      case StageKind::kBatchNorm: {
        diff::BatchNormStats stats;
        x = diff::BatchNorm(tape, x, tape.Bind(stage.params[0]), tape.Bind(stage.params[1]),
                            2, training, stage.running_mean, stage.running_variance,
                            options_.bn_eps, training ? &stats : nullptr);
        if (training) context.bn_updates.emplace_back(i, std::move(stats));
        break;
      }
      case StageKind::kNeuron:
        x = stage.neuron == NeuronMode::kLif ? neuron::Lif(tape, x, options_.lif)
                                             : diff::Relu(tape, x);
        break;
      case StageKind::kPool:
        x = diff::Pool2d(tape, x, stage.pool);
        break;
      case StageKind::kDropout:
        x = diff::Dropout(tape, x, stage.drop, training, context.rng);
        break;
    }
  }
  const Shape out = {steps, batch, output_width_};
  if (tape.Value(x).shape() != out) x = diff::Reshape(tape, x, out);
  return x;
}

void Network::ApplyBatchNormUpdates(const ForwardContext& context) {
  const double m = options_.bn_momentum;
  for (const auto& [index, stats] : context.bn_updates) {
    Stage& stage = *stages_.at(index);
    STSC_CHECK(stage.kind == StageKind::kBatchNorm, ErrorCode::kState,
               "batch-norm update addressed to a non-BN stage");
    for (std::size_t c = 0; c < stage.running_mean.size(); ++c) {
      stage.running_mean[c] = (1.0 - m) * stage.running_mean[c] + m * stats.mean[c];
      stage.running_variance[c] =
          (1.0 - m) * stage.running_variance[c] + m * stats.variance[c];
    }
  }
}

std::vector<Parameter*> Network::Parameters() {
  std::vector<Parameter*> params;
  for (auto& stage : stages_) {
    if (stage->stsc) {
      for (Parameter* p : stage->stsc->Parameters()) params.push_back(p);
    }
    for (Parameter& p : stage->params) params.push_back(&p);
  }
  return params;
}

std::size_t Network::ParameterCount() const {
  std::size_t count = 0;
  for (const auto& stage : stages_) {
    if (stage->stsc) count += stage->stsc->ParameterCount();
    for (const Parameter& p : stage->params) count += p.value.size();
  }
  return count;
}

std::size_t Network::stsc_block_count() const {
  std::size_t count = 0;
  for (const auto& stage : stages_) count += stage->stsc ? 1 : 0;
  return count;
}

std::vector<NamedTensor> Network::StateDict() const {
  std::vector<NamedTensor> state;
  for (const auto& stage : stages_) {
    if (stage->stsc) {
      for (const Parameter* p : stage->stsc->Parameters()) state.push_back({p->name, p->value});
    }
    for (const Parameter& p : stage->params) state.push_back({p.name, p.value});
    if (stage->kind == StageKind::kBatchNorm) {
      state.push_back({fmt::format("bn.{}.running_mean", stage->layer), stage->running_mean});
      state.push_back(
          {fmt::format("bn.{}.running_var", stage->layer), stage->running_variance});
    }
  }
  return state;
}

void Network::LoadStateDict(const std::vector<NamedTensor>& state) {
  std::map<std::string, const Tensor*> by_name;
  for (const NamedTensor& t : state) by_name[t.name] = &t.value;
  auto assign = [&](const std::string& name, Tensor& target) {
    const auto it = by_name.find(name);
    STSC_CHECK(it != by_name.end(), ErrorCode::kCorruptInput, "checkpoint lacks '{}'", name);
    STSC_CHECK(it->second->shape() == target.shape(), ErrorCode::kCorruptInput,
               "checkpoint '{}' has shape {}, network expects {}", name,
               diff::ShapeString(it->second->shape()), diff::ShapeString(target.shape()));
    target = *it->second;
    by_name.erase(it);
  };
  for (auto& stage : stages_) {
    if (stage->stsc) {
      for (Parameter* p : stage->stsc->Parameters()) assign(p->name, p->value);
    }
    for (Parameter& p : stage->params) assign(p.name, p.value);
    if (stage->kind == StageKind::kBatchNorm) {
      assign(fmt::format("bn.{}.running_mean", stage->layer), stage->running_mean);
      assign(fmt::format("bn.{}.running_var", stage->layer), stage->running_variance);
    }
  }
  STSC_CHECK(by_name.empty(), ErrorCode::kCorruptInput,
             "checkpoint has {} entries the network does not use (first: '{}')",
             by_name.size(), by_name.empty() ? "" : by_name.begin()->first);
}

std::string Network::Describe() const {
  std::string out = fmt::format("network: {}\n", spec_.text);
  out += fmt::format("input: {}\n", diff::ShapeString(sample_shape_));
  out += fmt::format("stsc policy: {} (K_F={}, K_G={}, r={}, trf={}, fli={})\n",
                     PolicyName(spec_.stsc_points), spec_.stsc.trf_kernel,
                     spec_.stsc.fli_kernel, spec_.stsc.reduction,
                     spec_.stsc.enable_trf ? "on" : "off", spec_.stsc.enable_fli ? "on" : "off");
  std::size_t fc_layers = 0;
  std::size_t conv_layers = 0;
  for (const auto& stage : stages_) {
    std::size_t count = 0;
    for (const Parameter& p : stage->params) count += p.value.size();
    switch (stage->kind) {
      case StageKind::kStsc: {
        const auto& block = *stage->stsc;
        out += fmt::format("  STSC-{} before layer {}: channels={} M={} params={}\n",
                           block.config().variant == synapse::Variant::kDense1d ? "1D" : "3D",
                           stage->layer, block.channels(), block.hidden(),
                           block.ParameterCount());
        break;
      }
      case StageKind::kLinear:
        ++fc_layers;
        out += fmt::format("  layer {}: FC {} -> {} params={}\n", stage->layer,
                           stage->in_shape[0], stage->out_shape[0], count);
        break;
      case StageKind::kConv:
        ++conv_layers;
        out += fmt::format("  layer {}: Conv3x3 {} -> {} params={}\n", stage->layer,
                           diff::ShapeString(stage->in_shape),
                           diff::ShapeString(stage->out_shape), count);
        break;
      case StageKind::kBatchNorm:
        out += fmt::format("    BN channels={} params={}\n", stage->out_shape[0], count);
        break;
      case StageKind::kNeuron:
        out += fmt::format("    neuron: {}\n", NeuronModeName(stage->neuron));
        break;
      case StageKind::kPool:
        out += fmt::format("  {}: {} -> {}\n",
                           stage->pool == diff::PoolKind::kMax ? "MaxPool2" : "AvgPool2",
                           diff::ShapeString(stage->in_shape),
                           diff::ShapeString(stage->out_shape));
        break;
      case StageKind::kDropout:
        out += fmt::format("  Dropout p={}\n", stage->drop);
        break;
    }
  }
  out += fmt::format("voting: {} -> {} (groups of {})\n", output_width_, spec_.classes,
                     output_width_ / spec_.classes);
  out += fmt::format("fc layers: {}, conv layers: {}, stsc blocks: {}\n", fc_layers,
                     conv_layers, stsc_block_count());
  out += fmt::format("parameters: {}\n", ParameterCount());
  return out;
}

}  // namespace stsc::net
