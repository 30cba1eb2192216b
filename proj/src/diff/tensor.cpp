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

#include "diff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "common/error.hpp"

namespace stsc::diff {

std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeString(const Shape& shape) {
  return fmt::format("[{}]", fmt::join(shape, ", "));
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), values_(NumElements(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  STSC_CHECK(values_.size() == NumElements(shape_), ErrorCode::kInvalidArgument,
             "tensor of shape {} needs {} values, got {}", ShapeString(shape_),
             NumElements(shape_), values_.size());
}

std::size_t Tensor::Offset(std::initializer_list<std::size_t> index) const {
  STSC_CHECK(index.size() == shape_.size(), ErrorCode::kInvalidArgument,
             "index rank {} does not match tensor rank {}", index.size(),
             shape_.size());
  std::size_t offset = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    STSC_CHECK(i < shape_[axis], ErrorCode::kInvalidArgument,
               "index {} out of range for axis {} of shape {}", i, axis,
               ShapeString(shape_));
    offset = offset * shape_[axis] + i;
    ++axis;
  }
  return offset;
}

double& Tensor::at(std::initializer_list<std::size_t> index) {
  return values_[Offset(index)];
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
  return values_[Offset(index)];
}

Tensor Tensor::Reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).Reshaped(std::move(shape));
}

Tensor Tensor::Reshaped(Shape shape) && {
  STSC_CHECK(NumElements(shape) == values_.size(), ErrorCode::kInvalidArgument,
             "cannot reshape {} to {}", ShapeString(shape_), ShapeString(shape));
  shape_ = std::move(shape);
  return std::move(*this);
}

void Tensor::Fill(double value) { std::fill(values_.begin(), values_.end(), value); }

Tensor& Tensor::operator+=(const Tensor& other) {
  STSC_CHECK(other.shape_ == shape_, ErrorCode::kInvalidArgument,
             "shape mismatch in +=: {} vs {}", ShapeString(shape_),
             ShapeString(other.shape_));
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Tensor& Tensor::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

bool Tensor::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

AxisView ViewAroundAxis(const Shape& shape, std::size_t axis) {
  STSC_CHECK(axis < shape.size(), ErrorCode::kInvalidArgument,
             "axis {} out of range for shape {}", axis, ShapeString(shape));
  AxisView view;
  for (std::size_t i = 0; i < axis; ++i) view.outer *= shape[i];
  view.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) view.inner *= shape[i];
  return view;
}

double MaxAbsDiff(const Tensor& a, const Tensor& b) {
  STSC_CHECK(a.shape() == b.shape(), ErrorCode::kInvalidArgument,
             "shape mismatch: {} vs {}", ShapeString(a.shape()),
             ShapeString(b.shape()));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace stsc::diff
