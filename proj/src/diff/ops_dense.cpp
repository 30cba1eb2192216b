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
#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "diff/eigen_maps.hpp"
#include "diff/ops.hpp"

namespace stsc::diff {

Var MatMul(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.Value(a);
  const Tensor& bv = tape.Value(b);
  STSC_CHECK(av.rank() == 2 && bv.rank() == 2 && av.dim(1) == bv.dim(0),
             ErrorCode::kInvalidArgument, "matmul: cannot multiply {} by {}",
             ShapeString(av.shape()), ShapeString(bv.shape()));
  const auto m = static_cast<Eigen::Index>(av.dim(0));
  const auto k = static_cast<Eigen::Index>(av.dim(1));
  const auto n = static_cast<Eigen::Index>(bv.dim(1));
  Tensor out({av.dim(0), bv.dim(1)});
  AsMatrix(out.data(), m, n).noalias() =
      AsMatrix(av.data(), m, k) * AsMatrix(bv.data(), k, n);
  return tape.Record(
      std::move(out), {a, b},
      [&tape, a, b, m, k, n](const Tensor& g, std::span<Tensor* const> grads) {
        auto gm = AsMatrix(g.data(), m, n);
        if (grads[0] != nullptr) {
          AsMatrix(grads[0]->data(), m, k).noalias() +=
              gm * AsMatrix(tape.Value(b).data(), k, n).transpose();
        }
        if (grads[1] != nullptr) {
          AsMatrix(grads[1]->data(), k, n).noalias() +=
              AsMatrix(tape.Value(a).data(), m, k).transpose() * gm;
        }
      },
      "matmul");
}

Var Linear(Tape& tape, Var x, Var weight, Var bias) {
  const Tensor& xv = tape.Value(x);
  const Tensor& wv = tape.Value(weight);
  STSC_CHECK(wv.rank() == 2 && xv.rank() >= 1 && xv.shape().back() == wv.dim(0),
             ErrorCode::kInvalidArgument, "linear: input {} does not fit weight {}",
             ShapeString(xv.shape()), ShapeString(wv.shape()));
  const auto in = static_cast<Eigen::Index>(wv.dim(0));
  const auto out_features = static_cast<Eigen::Index>(wv.dim(1));
  const auto rows = static_cast<Eigen::Index>(xv.size() / wv.dim(0));
  Shape out_shape = xv.shape();
  out_shape.back() = wv.dim(1);
  Tensor out(out_shape);
  auto om = AsMatrix(out.data(), rows, out_features);
  om.noalias() = AsMatrix(xv.data(), rows, in) * AsMatrix(wv.data(), in, out_features);
  std::vector<Var> inputs = {x, weight};
  if (bias.valid()) {
    const Tensor& bv = tape.Value(bias);
    STSC_CHECK(bv.rank() == 1 && bv.dim(0) == wv.dim(1), ErrorCode::kInvalidArgument,
               "linear: bias {} does not fit weight {}", ShapeString(bv.shape()),
               ShapeString(wv.shape()));
    om.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bv.data(), out_features);
    inputs.push_back(bias);
  }
  return tape.Record(
      std::move(out), std::move(inputs),
      [&tape, x, weight, rows, in, out_features](const Tensor& g,
                                                 std::span<Tensor* const> grads) {
        auto gm = AsMatrix(g.data(), rows, out_features);
        if (grads[0] != nullptr) {
          AsMatrix(grads[0]->data(), rows, in).noalias() +=
              gm * AsMatrix(tape.Value(weight).data(), in, out_features).transpose();
        }
        if (grads[1] != nullptr) {
          AsMatrix(grads[1]->data(), in, out_features).noalias() +=
              AsMatrix(tape.Value(x).data(), rows, in).transpose() * gm;
        }
        if (grads.size() > 2 && grads[2] != nullptr) {
          Eigen::Map<Eigen::RowVectorXd>(grads[2]->data(), out_features) +=
              gm.colwise().sum();
        }
      },
      "linear");
}

Var Add(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.Value(a);
  const Tensor& bv = tape.Value(b);
  STSC_CHECK(av.shape() == bv.shape(), ErrorCode::kInvalidArgument,
             "add: shape mismatch {} vs {}", ShapeString(av.shape()),
             ShapeString(bv.shape()));
  Tensor out = av;
  out += bv;
  return tape.Record(
      std::move(out), {a, b},
      [](const Tensor& g, std::span<Tensor* const> grads) {
        for (Tensor* slot : grads)
          if (slot != nullptr) *slot += g;
      },
      "add");
}

Var Mul(Tape& tape, Var a, Var b) {
  const Tensor& av = tape.Value(a);
  const Tensor& bv = tape.Value(b);
  STSC_CHECK(av.shape() == bv.shape(), ErrorCode::kInvalidArgument,
             "mul: shape mismatch {} vs {}", ShapeString(av.shape()),
             ShapeString(bv.shape()));
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return tape.Record(
      std::move(out), {a, b},
      [&tape, a, b](const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& av = tape.Value(a);
        const Tensor& bv = tape.Value(b);
        if (grads[0] != nullptr)
          for (std::size_t i = 0; i < g.size(); ++i) (*grads[0])[i] += g[i] * bv[i];
        if (grads[1] != nullptr)
          for (std::size_t i = 0; i < g.size(); ++i) (*grads[1])[i] += g[i] * av[i];
      },
      "mul");
}

Var Scale(Tape& tape, Var x, double factor) {
  Tensor out = tape.Value(x);
  out *= factor;
  return tape.Record(
      std::move(out), {x},
      [factor](const Tensor& g, std::span<Tensor* const> grads) {
        for (std::size_t i = 0; i < g.size(); ++i) (*grads[0])[i] += factor * g[i];
      },
      "scale");
}

namespace {

double Logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

Var Sigmoid(Tape& tape, Var x) {
  const Tensor& xv = tape.Value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = Logistic(xv[i]);
  return tape.Record(
      std::move(out), {x},
      [&tape, x](const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& xv = tape.Value(x);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = Logistic(xv[i]);
          (*grads[0])[i] += g[i] * y * (1.0 - y);
        }
      },
      "sigmoid");
}

Var Relu(Tape& tape, Var x) {
  const Tensor& xv = tape.Value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = std::max(xv[i], 0.0);
  return tape.Record(
      std::move(out), {x},
      [&tape, x](const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& xv = tape.Value(x);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (xv[i] > 0.0) (*grads[0])[i] += g[i];
      },
      "relu");
}

Var Reshape(Tape& tape, Var x, Shape shape) {
  Tensor out = tape.Value(x).Reshaped(std::move(shape));
  return tape.Record(
      std::move(out), {x},
      [](const Tensor& g, std::span<Tensor* const> grads) {
        Tensor& slot = *grads[0];
        for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
      },
      "reshape");
}

Var Sum(Tape& tape, Var x) {
  const Tensor& xv = tape.Value(x);
  double total = 0.0;
  for (double v : xv.values()) total += v;
  return tape.Record(
      Tensor({1}, total), {x},
      [](const Tensor& g, std::span<Tensor* const> grads) {
        for (double& v : grads[0]->values()) v += g[0];
      },
      "sum");
}

Var WeightedSum(Tape& tape, Var x, Tensor weights) {
  const Tensor& xv = tape.Value(x);
  STSC_CHECK(weights.shape() == xv.shape(), ErrorCode::kInvalidArgument,
             "weighted_sum: weights {} do not match input {}",
             ShapeString(weights.shape()), ShapeString(xv.shape()));
  double total = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) total += xv[i] * weights[i];
  return tape.Record(
      Tensor({1}, total), {x},
      [w = std::move(weights)](const Tensor& g, std::span<Tensor* const> grads) {
        for (std::size_t i = 0; i < w.size(); ++i) (*grads[0])[i] += g[0] * w[i];
      },
      "weighted_sum");
}

}  // namespace stsc::diff
