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
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "diff/tensor.hpp"

namespace stsc::diff {

// A named trainable array. Gradients accumulate across backward passes until
// ZeroGrad() is called.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor value)
      : name(std::move(name)), value(std::move(value)),
        grad(Tensor::ZerosLike(this->value)) {}

  void ZeroGrad() { grad.Fill(0.0); }

  std::string name;
  Tensor value;
  Tensor grad;
};

// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t id = kInvalid;
  bool valid() const { return id != kInvalid; }
};

enum class ParamGradMode {
  kImmediate,  // Backward() adds parameter gradients into Parameter::grad.
  kDeferred,   // Kept on the tape until AccumulateParameterGrads().
};

// Records forward values and their vector-Jacobian maps in evaluation order;
// Backward() visits them in reverse.
class Tape {
 public:
  // Receives the output gradient and one slot per input; a slot is null when
  // that input does not need a gradient. Implementations must add, not assign.
  using BackwardFn =
      std::function<void(const Tensor& grad_out, std::span<Tensor* const> grad_in)>;

  explicit Tape(ParamGradMode mode = ParamGradMode::kImmediate) : mode_(mode) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  Var Leaf(Tensor value);  // gradient is readable through Grad() after Backward
  Var Bind(Parameter& parameter);
  Var Record(Tensor value, std::vector<Var> inputs, BackwardFn backward,
             const char* op_name);

  const Tensor& Value(Var v) const;
  const Tensor& Grad(Var v) const;
  bool RequiresGrad(Var v) const;
  const char* OpName(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(output) with ones.
  void Backward(Var output);
  void Backward(Var output, const Tensor& seed);

  void AccumulateParameterGrads();

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<Var> inputs;
    BackwardFn backward;
    Parameter* parameter = nullptr;
    const char* op_name = "";
    bool requires_grad = false;
  };

  const Node& At(Var v) const;

  ParamGradMode mode_;
  std::vector<Node> nodes_;
  bool has_backward_ = false;
};

}  // namespace stsc::diff
