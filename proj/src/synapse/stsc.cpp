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
#include "synapse/stsc.hpp"

#include <cmath>

#include "common/error.hpp"

namespace stsc::synapse {

using diff::Parameter;
using diff::Shape;
using diff::Tape;
using diff::Tensor;
using diff::Var;

void StscConfig::Validate() const {
  STSC_CHECK(trf_kernel % 2 == 1, ErrorCode::kInvalidArgument,
             "TRF kernel size must be odd, got {}", trf_kernel);
  STSC_CHECK(fli_kernel % 2 == 1, ErrorCode::kInvalidArgument,
             "FLI kernel size must be odd, got {}", fli_kernel);
  STSC_CHECK(reduction >= 1, ErrorCode::kInvalidArgument,
             "FLI reduction ratio must be >= 1, got {}", reduction);
  STSC_CHECK(enable_trf || enable_fli, ErrorCode::kInvalidArgument,
             "an STSC block needs at least one of TRF and FLI");
}

std::size_t ReducedWidth(std::size_t channels, std::size_t reduction) {
  STSC_CHECK(reduction >= 1 && channels >= 1, ErrorCode::kInvalidArgument,
             "bad FLI width {} / {}", channels, reduction);
  return (channels + reduction - 1) / reduction;
}

Var TrfForward(Tape& tape, Var x, Var kernel, Variant variant,
               diff::TemporalPadding padding) {
  if (variant == Variant::kDense1d) return diff::DepthwiseTConv1d(tape, x, kernel, padding);
  return diff::DepthwiseTConv3d(tape, x, kernel, padding);
}

namespace {

Var DenseGate(Tape& tape, Var x, Var mix, Var expand, diff::TemporalPadding padding) {
  const Tensor& mv = tape.Value(mix);
  const Tensor& ev = tape.Value(expand);
  STSC_CHECK(mv.rank() == 3 && ev.rank() == 2 && ev.dim(0) == mv.dim(2) &&
                 ev.dim(1) == mv.dim(1),
             ErrorCode::kInvalidArgument, "FLI weights {} and {} do not fit together",
             diff::ShapeString(mv.shape()), diff::ShapeString(ev.shape()));
  const Var hidden = diff::TConv1dMix(tape, x, mix, padding);
  const Var logits = diff::Linear(tape, diff::Relu(tape, hidden), expand, Var{});
  return diff::Sigmoid(tape, logits);
}

}  // namespace

Var FliForward(Tape& tape, Var x, Var mix, Var expand, Variant variant,
               diff::TemporalPadding padding) {
  if (variant == Variant::kDense1d) return DenseGate(tape, x, mix, expand, padding);
  const Shape shape = tape.Value(x).shape();
  STSC_CHECK(shape.size() >= 4, ErrorCode::kInvalidArgument,
             "3-D FLI expects [T, ..., C, H, W], got {}", diff::ShapeString(shape));
  const Var pooled = diff::SpatialAvg(tape, x);
  const Var gate = DenseGate(tape, pooled, mix, expand, padding);
  return diff::BroadcastSpatial(tape, gate, shape[shape.size() - 2], shape.back());
}

StscBlock::StscBlock(std::string prefix, std::size_t channels, StscConfig config,
                     std::mt19937_64& rng)
    : config_(config), channels_(channels), hidden_(ReducedWidth(channels, config.reduction)) {
  config_.Validate();
  if (config_.enable_trf) {
    // Delta kernel plus U(-0.01, 0.01) noise.
    const std::size_t center =
        config_.padding == diff::TemporalPadding::kSymmetric ? config_.trf_kernel / 2 : 0;
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    Tensor kernel({config_.trf_kernel, channels});
    for (std::size_t k = 0; k < config_.trf_kernel; ++k)
      for (std::size_t c = 0; c < channels; ++c)
        kernel.at({k, c}) = (k == center ? 1.0 : 0.0) + noise(rng);
    trf_kernel_.emplace(prefix + ".trf.W_F", std::move(kernel));
  }
  if (config_.enable_fli) {
    auto uniform_init = [&rng](Shape shape, std::size_t fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> dist(-bound, bound);
      Tensor t(std::move(shape));
      for (double& v : t.values()) v = dist(rng);
      return t;
    };
    fli_mix_.emplace(prefix + ".fli.W_G1",
                     uniform_init({config_.fli_kernel, channels, hidden_},
                                  config_.fli_kernel * channels));
    fli_expand_.emplace(prefix + ".fli.W_G2", uniform_init({hidden_, channels}, hidden_));
  }
}

Var StscBlock::Forward(Tape& tape, Var x) {
  const Tensor& xv = tape.Value(x);
  const std::size_t channel_axis =
      config_.variant == Variant::kDense1d ? xv.rank() - 1 : xv.rank() - 3;
  STSC_CHECK(xv.rank() >= (config_.variant == Variant::kDense1d ? 2u : 4u) &&
                 xv.dim(channel_axis) == channels_,
             ErrorCode::kInvalidArgument, "STSC block for {} channels got input {}",
             channels_, diff::ShapeString(xv.shape()));
  Var filtered = x;
  if (trf_kernel_) {
    filtered = TrfForward(tape, x, tape.Bind(*trf_kernel_), config_.variant, config_.padding);
  }
  if (!fli_mix_) return filtered;
  const Var gate = FliForward(tape, x, tape.Bind(*fli_mix_), tape.Bind(*fli_expand_),
                              config_.variant, config_.padding);
  return diff::Mul(tape, filtered, gate);
}

std::vector<Parameter*> StscBlock::Parameters() {
  std::vector<Parameter*> params;
  if (trf_kernel_) params.push_back(&*trf_kernel_);
  if (fli_mix_) {
    params.push_back(&*fli_mix_);
    params.push_back(&*fli_expand_);
  }
  return params;
}

std::size_t StscBlock::ParameterCount() const {
  std::size_t count = 0;
  if (trf_kernel_) count += trf_kernel_->value.size();
  if (fli_mix_) count += fli_mix_->value.size() + fli_expand_->value.size();
  return count;
}

}  // namespace stsc::synapse
