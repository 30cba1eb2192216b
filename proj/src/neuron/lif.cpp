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
#include "neuron/lif.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace stsc::neuron {

using diff::Tensor;

void LifConfig::Validate() const {
  STSC_CHECK(tau >= 1.0, ErrorCode::kInvalidArgument, "LIF tau must be >= 1, got {}", tau);
  STSC_CHECK(v_th > 0.0, ErrorCode::kInvalidArgument, "LIF threshold must be > 0, got {}",
             v_th);
  STSC_CHECK(surrogate_alpha > 0.0, ErrorCode::kInvalidArgument,
             "ATan width must be > 0, got {}", surrogate_alpha);
}

double AtanStep(double x, double alpha) {
  return 0.5 + std::atan(std::numbers::pi * alpha * x / 2.0) / std::numbers::pi;
}

double AtanStepDerivative(double x, double alpha) {
  const double u = std::numbers::pi * alpha * x / 2.0;
  return (alpha / 2.0) / (1.0 + u * u);
}

namespace {

double Fire(double x, const LifConfig& config) {
  if (config.relaxed) return AtanStep(x, config.surrogate_alpha);
  if (config.fire_at_threshold) return x >= 0.0 ? 1.0 : 0.0;
  return x > 0.0 ? 1.0 : 0.0;
}

}  // namespace

LifTrace LifForward(const Tensor& input, const LifConfig& config) {
  config.Validate();
  STSC_CHECK(input.rank() >= 1, ErrorCode::kInvalidArgument,
             "LIF input must have a leading time axis");
  const std::size_t steps = input.dim(0);
  const std::size_t frame = steps == 0 ? 0 : input.size() / steps;
  const double decay = config.Decay();
  LifTrace trace{Tensor(input.shape()), Tensor(input.shape())};
  for (std::size_t t = 0; t < steps; ++t) {
    const double* in = input.data() + t * frame;
    double* v = trace.membrane.data() + t * frame;
    double* s = trace.spikes.data() + t * frame;
    for (std::size_t i = 0; i < frame; ++i) {
      double carried = 0.0;
      if (t > 0) {
        const std::size_t prev = (t - 1) * frame + i;
        carried = decay * trace.membrane[prev] * (1.0 - trace.spikes[prev]);
      }
      v[i] = carried + in[i];
      s[i] = Fire(v[i] - config.v_th, config);
    }
  }
  return trace;
}

Tensor LifBackward(const LifTrace& trace, const Tensor& grad_spikes,
                   const LifConfig& config) {
  config.Validate();
  STSC_CHECK(grad_spikes.shape() == trace.spikes.shape(), ErrorCode::kInvalidArgument,
             "LIF backward: gradient shape {} does not match trace {}",
             diff::ShapeString(grad_spikes.shape()),
             diff::ShapeString(trace.spikes.shape()));
  const std::size_t steps = trace.spikes.rank() == 0 ? 0 : trace.spikes.dim(0);
  const std::size_t frame = steps == 0 ? 0 : trace.spikes.size() / steps;
  const double decay = config.Decay();
  Tensor grad_input(grad_spikes.shape());
  // grad_input(t) is dL/dV(t); the value at t+1 feeds step t.
  for (std::size_t t = steps; t-- > 0;) {
    for (std::size_t i = 0; i < frame; ++i) {
      const std::size_t j = t * frame + i;
      const double v = trace.membrane[j];
      const double s = trace.spikes[j];
      double grad_s = grad_spikes[j];
      double grad_v = 0.0;
      if (t + 1 < steps) {
        const double grad_v_next = grad_input[j + frame];
        if (!config.detach_reset) grad_s += grad_v_next * (-decay * v);
        grad_v = grad_v_next * decay * (1.0 - s);
      }
      grad_v += grad_s * AtanStepDerivative(v - config.v_th, config.surrogate_alpha);
      grad_input[j] = grad_v;
    }
  }
  return grad_input;
}

LifNeuron::LifNeuron(LifConfig config) : config_(config) { config_.Validate(); }

Tensor LifNeuron::Forward(const Tensor& input) {
  trace_ = LifForward(input, config_);
  return trace_->spikes;
}

Tensor LifNeuron::Backward(const Tensor& grad_spikes) const {
  STSC_CHECK(trace_.has_value(), ErrorCode::kState, "LIF backward called before forward");
  return LifBackward(*trace_, grad_spikes, config_);
}

diff::Var Lif(diff::Tape& tape, diff::Var input, const LifConfig& config) {
  LifTrace trace = LifForward(tape.Value(input), config);
  Tensor spikes = trace.spikes;
  return tape.Record(
      std::move(spikes), {input},
      [trace = std::move(trace), config](const Tensor& g,
                                         std::span<Tensor* const> grads) {
        *grads[0] += LifBackward(trace, g, config);
      },
      "lif");
}

}  // namespace stsc::neuron
