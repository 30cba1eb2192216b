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
#include "diff/tape.hpp"

#include "common/error.hpp"

namespace stsc::diff {

Var Tape::Constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  node.op_name = "constant";
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::Leaf(Tensor value) {
  Node node;
  node.value = std::move(value);
  node.op_name = "leaf";
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::Bind(Parameter& parameter) {
  Node node;
  node.value = parameter.value;
  node.parameter = &parameter;
  node.op_name = "parameter";
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::Record(Tensor value, std::vector<Var> inputs, BackwardFn backward,
                 const char* op_name) {
  Node node;
  node.value = std::move(value);
  node.op_name = op_name;
  for (Var in : inputs) {
    STSC_CHECK(in.valid() && in.id < nodes_.size(), ErrorCode::kInvalidArgument,
               "{}: input handle not on this tape", op_name);
    node.requires_grad = node.requires_grad || nodes_[in.id].requires_grad;
  }
  node.inputs = std::move(inputs);
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::At(Var v) const {
  STSC_CHECK(v.valid() && v.id < nodes_.size(), ErrorCode::kInvalidArgument,
             "variable handle not on this tape");
  return nodes_[v.id];
}

const Tensor& Tape::Value(Var v) const { return At(v).value; }

const Tensor& Tape::Grad(Var v) const {
  const Node& node = At(v);
  STSC_CHECK(has_backward_, ErrorCode::kState, "gradient requested before Backward()");
  STSC_CHECK(node.requires_grad, ErrorCode::kState,
             "{} does not require a gradient", node.op_name);
  return node.grad;
}

bool Tape::RequiresGrad(Var v) const { return At(v).requires_grad; }

const char* Tape::OpName(Var v) const { return At(v).op_name; }

void Tape::Backward(Var output) {
  Backward(output, Tensor(Value(output).shape(), 1.0));
}

void Tape::Backward(Var output, const Tensor& seed) {
  const Node& out = At(output);
  STSC_CHECK(seed.shape() == out.value.shape(), ErrorCode::kInvalidArgument,
             "seed shape {} does not match output shape {}",
             ShapeString(seed.shape()), ShapeString(out.value.shape()));
  for (Node& node : nodes_) {
    if (node.requires_grad) {
      node.grad = Tensor::ZerosLike(node.value);
    } else {
      node.grad = Tensor();
    }
  }
  has_backward_ = true;
  if (!out.requires_grad) return;
  nodes_[output.id].grad += seed;

  std::vector<Tensor*> slots;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || !node.backward) continue;
    slots.clear();
    for (Var in : node.inputs) {
      Node& src = nodes_[in.id];
      slots.push_back(src.requires_grad ? &src.grad : nullptr);
    }
    node.backward(node.grad, slots);
  }
  if (mode_ == ParamGradMode::kImmediate) AccumulateParameterGrads();
}

void Tape::AccumulateParameterGrads() {
  STSC_CHECK(has_backward_, ErrorCode::kState,
             "parameter gradients requested before Backward()");
  for (Node& node : nodes_) {
    if (node.parameter != nullptr) node.parameter->grad += node.grad;
  }
}

}  // namespace stsc::diff
