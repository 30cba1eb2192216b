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

#include "diff/tape.hpp"
#include "diff/tensor.hpp"

namespace stsc::neuron {

struct LifConfig {
  double tau = 2.0;             // >= 1; decay factor is 1 - 1/tau
  double v_th = 1.0;            // > 0
  double surrogate_alpha = 2.0; // ATan width
  // Smooth forward: the ATan sigmoid replaces the step everywhere.
  bool relaxed = false;
  bool fire_at_threshold = true;  // V == V_th fires
  bool detach_reset = false;      // no gradient through the (1 - S) reset factor

  void Validate() const;
  double Decay() const { return 1.0 - 1.0 / tau; }
};

// 1/2 + arctan(pi * alpha * x / 2) / pi
double AtanStep(double x, double alpha);
// Derivative of AtanStep: (alpha / 2) / (1 + (pi * alpha * x / 2)^2)
double AtanStepDerivative(double x, double alpha);

// Recorded forward pass. membrane holds V(t) after integration and before the
// reset is applied at t+1.
struct LifTrace {
  diff::Tensor membrane;
  diff::Tensor spikes;
};

// input [T, ...]; V(0) = S(0) = 0.
//   V(t) = (1 - 1/tau) V(t-1) (1 - S(t-1)) + I(t)
//   S(t) = step(V(t) - V_th)
LifTrace LifForward(const diff::Tensor& input, const LifConfig& config);

// Reverse-time recurrence through the membrane and reset paths with the ATan
// derivative in place of the step derivative. The same code serves the
// spiking and relaxed modes; only the recorded trace differs.
diff::Tensor LifBackward(const LifTrace& trace, const diff::Tensor& grad_spikes,
                         const LifConfig& config);

// Stateful wrapper: Backward() uses the trace of the latest Forward().
class LifNeuron {
 public:
  explicit LifNeuron(LifConfig config);

  diff::Tensor Forward(const diff::Tensor& input);
  diff::Tensor Backward(const diff::Tensor& grad_spikes) const;

  const LifConfig& config() const { return config_; }
  const std::optional<LifTrace>& trace() const { return trace_; }

 private:
  LifConfig config_;
  std::optional<LifTrace> trace_;
};

// Tape op: input [T, ...] -> spikes [T, ...].
diff::Var Lif(diff::Tape& tape, diff::Var input, const LifConfig& config);

}  // namespace stsc::neuron
