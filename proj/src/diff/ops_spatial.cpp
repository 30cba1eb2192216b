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
#include <limits>

#include "common/error.hpp"
#include "diff/eigen_maps.hpp"
#include "diff/ops.hpp"

namespace stsc::diff {

namespace {

constexpr std::size_t kConvKernel = 3;

// Unfolds one [C, H, W] image into [C*9, H*W] columns (zero padding 1).
void Im2Col(const double* image, std::size_t channels, std::size_t height,
            std::size_t width, double* columns) {
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t kh = 0; kh < kConvKernel; ++kh) {
      for (std::size_t kw = 0; kw < kConvKernel; ++kw) {
        double* row = columns + ((c * kConvKernel + kh) * kConvKernel + kw) * plane;
        for (std::size_t h = 0; h < height; ++h) {
          const long ih = static_cast<long>(h + kh) - 1;
          for (std::size_t w = 0; w < width; ++w) {
            const long iw = static_cast<long>(w + kw) - 1;
            const bool inside = ih >= 0 && iw >= 0 && ih < static_cast<long>(height) &&
                                iw < static_cast<long>(width);
            row[h * width + w] = inside ? image[(c * height + ih) * width + iw] : 0.0;
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: scatters columns back into an image (accumulating).
void Col2Im(const double* columns, std::size_t channels, std::size_t height,
            std::size_t width, double* image) {
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t kh = 0; kh < kConvKernel; ++kh) {
      for (std::size_t kw = 0; kw < kConvKernel; ++kw) {
        const double* row =
            columns + ((c * kConvKernel + kh) * kConvKernel + kw) * plane;
        for (std::size_t h = 0; h < height; ++h) {
          const long ih = static_cast<long>(h + kh) - 1;
          if (ih < 0 || ih >= static_cast<long>(height)) continue;
          for (std::size_t w = 0; w < width; ++w) {
            const long iw = static_cast<long>(w + kw) - 1;
            if (iw < 0 || iw >= static_cast<long>(width)) continue;
            image[(c * height + ih) * width + iw] += row[h * width + w];
          }
        }
      }
    }
  }
}

}  // namespace

Var Conv2d(Tape& tape, Var x, Var weight, Var bias) {
  const Tensor& xv = tape.Value(x);
  const Tensor& wv = tape.Value(weight);
  STSC_CHECK(xv.rank() == 4, ErrorCode::kInvalidArgument,
             "conv2d expects [B, C, H, W], got {}", ShapeString(xv.shape()));
  STSC_CHECK(wv.rank() == 4 && wv.dim(2) == kConvKernel && wv.dim(3) == kConvKernel,
             ErrorCode::kInvalidArgument, "conv2d expects a [C_out, C_in, 3, 3] kernel, got {}",
             ShapeString(wv.shape()));
  STSC_CHECK(wv.dim(1) == xv.dim(1), ErrorCode::kInvalidArgument,
             "conv2d: kernel has {} input channels, input has {}", wv.dim(1), xv.dim(1));
  const std::size_t batch = xv.dim(0);
  const std::size_t c_in = xv.dim(1);
  const std::size_t height = xv.dim(2);
  const std::size_t width = xv.dim(3);
  const std::size_t c_out = wv.dim(0);
  const auto plane = static_cast<Eigen::Index>(height * width);
  const auto patch = static_cast<Eigen::Index>(c_in * kConvKernel * kConvKernel);
  const auto co = static_cast<Eigen::Index>(c_out);

  Tensor out({batch, c_out, height, width});
  std::vector<double> columns(static_cast<std::size_t>(patch * plane));
  auto wm = AsMatrix(wv.data(), co, patch);
  for (std::size_t b = 0; b < batch; ++b) {
    Im2Col(xv.data() + b * c_in * height * width, c_in, height, width, columns.data());
    AsMatrix(out.data() + b * c_out * height * width, co, plane).noalias() =
        wm * AsMatrix(columns.data(), patch, plane);
  }
  std::vector<Var> inputs = {x, weight};
  if (bias.valid()) {
    const Tensor& bv = tape.Value(bias);
    STSC_CHECK(bv.rank() == 1 && bv.dim(0) == c_out, ErrorCode::kInvalidArgument,
               "conv2d: bias {} does not match {} output channels",
               ShapeString(bv.shape()), c_out);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t c = 0; c < c_out; ++c) {
        double* dst = out.data() + (b * c_out + c) * height * width;
        for (Eigen::Index i = 0; i < plane; ++i) dst[i] += bv[c];
      }
    inputs.push_back(bias);
  }
  return tape.Record(
      std::move(out), std::move(inputs),
      [&tape, x, weight, batch, c_in, c_out, height, width, plane, patch, co](
          const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& xv = tape.Value(x);
        auto wm = AsMatrix(tape.Value(weight).data(), co, patch);
        std::vector<double> columns(static_cast<std::size_t>(patch * plane));
        std::vector<double> grad_columns(static_cast<std::size_t>(patch * plane));
        for (std::size_t b = 0; b < batch; ++b) {
          auto gm = AsMatrix(g.data() + b * c_out * height * width, co, plane);
          if (grads[1] != nullptr) {
            Im2Col(xv.data() + b * c_in * height * width, c_in, height, width,
                   columns.data());
            AsMatrix(grads[1]->data(), co, patch).noalias() +=
                gm * AsMatrix(columns.data(), patch, plane).transpose();
          }
          if (grads[0] != nullptr) {
            AsMatrix(grad_columns.data(), patch, plane).noalias() = wm.transpose() * gm;
            Col2Im(grad_columns.data(), c_in, height, width,
                   grads[0]->data() + b * c_in * height * width);
          }
          if (grads.size() > 2 && grads[2] != nullptr) {
            for (std::size_t c = 0; c < c_out; ++c) (*grads[2])[c] += gm.row(c).sum();
          }
        }
      },
      "conv2d");
}

Var Pool2d(Tape& tape, Var x, PoolKind kind) {
  const Tensor& xv = tape.Value(x);
  STSC_CHECK(xv.rank() >= 2, ErrorCode::kInvalidArgument,
             "pool2d expects [..., H, W], got {}", ShapeString(xv.shape()));
  const std::size_t height = xv.dim(xv.rank() - 2);
  const std::size_t width = xv.dim(xv.rank() - 1);
  STSC_CHECK(height >= 2 && width >= 2, ErrorCode::kInvalidArgument,
             "pool2d needs spatial dims >= 2, got {}", ShapeString(xv.shape()));
  const std::size_t out_h = height / 2;
  const std::size_t out_w = width / 2;
  const std::size_t planes = xv.size() / (height * width);
  Shape out_shape = xv.shape();
  out_shape[out_shape.size() - 2] = out_h;
  out_shape[out_shape.size() - 1] = out_w;
  Tensor out(out_shape);
  // For max pooling, the flat input index that won each window.
  std::vector<std::size_t> winners(kind == PoolKind::kMax ? out.size() : 0);
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = xv.data() + p * height * width;
    for (std::size_t h = 0; h < out_h; ++h) {
      for (std::size_t w = 0; w < out_w; ++w) {
        const std::size_t o = (p * out_h + h) * out_w + w;
        if (kind == PoolKind::kAvg) {
          double acc = 0.0;
          for (std::size_t dh = 0; dh < 2; ++dh)
            for (std::size_t dw = 0; dw < 2; ++dw)
              acc += src[(2 * h + dh) * width + 2 * w + dw];
          out[o] = 0.25 * acc;
        } else {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t arg = 0;
          for (std::size_t dh = 0; dh < 2; ++dh)
            for (std::size_t dw = 0; dw < 2; ++dw) {
              const std::size_t idx = (2 * h + dh) * width + 2 * w + dw;
              if (src[idx] > best) {
                best = src[idx];
                arg = idx;
              }
            }
          out[o] = best;
          winners[o] = p * height * width + arg;
        }
      }
    }
  }
  return tape.Record(
      std::move(out), {x},
      [kind, winners = std::move(winners), planes, height, width, out_h, out_w](
          const Tensor& g, std::span<Tensor* const> grads) {
        Tensor& gx = *grads[0];
        if (kind == PoolKind::kMax) {
          for (std::size_t o = 0; o < g.size(); ++o) gx[winners[o]] += g[o];
          return;
        }
        for (std::size_t p = 0; p < planes; ++p)
          for (std::size_t h = 0; h < out_h; ++h)
            for (std::size_t w = 0; w < out_w; ++w) {
              const double share = 0.25 * g[(p * out_h + h) * out_w + w];
              for (std::size_t dh = 0; dh < 2; ++dh)
                for (std::size_t dw = 0; dw < 2; ++dw)
                  gx[p * height * width + (2 * h + dh) * width + 2 * w + dw] += share;
            }
      },
      kind == PoolKind::kMax ? "max_pool2d" : "avg_pool2d");
}

Var SpatialAvg(Tape& tape, Var x) {
  const Tensor& xv = tape.Value(x);
  STSC_CHECK(xv.rank() >= 3, ErrorCode::kInvalidArgument,
             "spatial_avg expects [..., C, H, W], got {}", ShapeString(xv.shape()));
  const std::size_t plane = xv.dim(xv.rank() - 2) * xv.dim(xv.rank() - 1);
  Shape out_shape(xv.shape().begin(), xv.shape().end() - 2);
  Tensor out(out_shape);
  const double inv = 1.0 / static_cast<double>(plane);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < plane; ++j) acc += xv[i * plane + j];
    out[i] = acc * inv;
  }
  return tape.Record(
      std::move(out), {x},
      [plane, inv](const Tensor& g, std::span<Tensor* const> grads) {
        for (std::size_t i = 0; i < g.size(); ++i)
          for (std::size_t j = 0; j < plane; ++j) (*grads[0])[i * plane + j] += g[i] * inv;
      },
      "spatial_avg");
}

Var BroadcastSpatial(Tape& tape, Var x, std::size_t height, std::size_t width) {
  const Tensor& xv = tape.Value(x);
  STSC_CHECK(xv.rank() >= 1 && height > 0 && width > 0, ErrorCode::kInvalidArgument,
             "broadcast_spatial: bad input {} or plane {}x{}", ShapeString(xv.shape()),
             height, width);
  const std::size_t plane = height * width;
  Shape out_shape = xv.shape();
  out_shape.push_back(height);
  out_shape.push_back(width);
  Tensor out(out_shape);
  for (std::size_t i = 0; i < xv.size(); ++i)
    std::fill_n(out.data() + i * plane, plane, xv[i]);
  return tape.Record(
      std::move(out), {x},
      [plane](const Tensor& g, std::span<Tensor* const> grads) {
        for (std::size_t i = 0; i < grads[0]->size(); ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < plane; ++j) acc += g[i * plane + j];
          (*grads[0])[i] += acc;
        }
      },
      "broadcast_spatial");
}

Var Dropout(Tape& tape, Var x, double p, bool training, std::mt19937_64& rng) {
  STSC_CHECK(p >= 0.0 && p < 1.0, ErrorCode::kInvalidArgument,
             "dropout probability must be in [0, 1), got {}", p);
  const Tensor& xv = tape.Value(x);
  if (!training || p == 0.0) {
    return tape.Record(
        xv, {x},
        [](const Tensor& g, std::span<Tensor* const> grads) { *grads[0] += g; },
        "dropout");
  }
  const double keep_scale = 1.0 / (1.0 - p);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Tensor mask(xv.shape());
  for (double& m : mask.values()) m = uniform(rng) >= p ? keep_scale : 0.0;
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return tape.Record(
      std::move(out), {x},
      [mask = std::move(mask)](const Tensor& g, std::span<Tensor* const> grads) {
        for (std::size_t i = 0; i < g.size(); ++i) (*grads[0])[i] += g[i] * mask[i];
      },
      "dropout");
}

Var BatchNorm(Tape& tape, Var x, Var gamma, Var beta, std::size_t channel_axis,
              bool training, const Tensor& running_mean,
              const Tensor& running_variance, double eps,
              BatchNormStats* stats_out) {
  const Tensor& xv = tape.Value(x);
  const AxisView view = ViewAroundAxis(xv.shape(), channel_axis);
  const std::size_t channels = view.extent;
  const Tensor& gv = tape.Value(gamma);
  const Tensor& bv = tape.Value(beta);
  STSC_CHECK(gv.shape() == Shape{channels} && bv.shape() == Shape{channels},
             ErrorCode::kInvalidArgument,
             "batchnorm: scale/shift must be [{}], got {} and {}", channels,
             ShapeString(gv.shape()), ShapeString(bv.shape()));
  const std::size_t count = view.outer * view.inner;
  STSC_CHECK(count > 0, ErrorCode::kInvalidArgument, "batchnorm on empty input");

  auto index = [&](std::size_t o, std::size_t c, std::size_t i) {
    return (o * channels + c) * view.inner + i;
  };

  Tensor mean(Shape{channels});
  Tensor inv_std(Shape{channels});
  if (training) {
    Tensor variance(Shape{channels});
    for (std::size_t c = 0; c < channels; ++c) {
      double acc = 0.0;
      for (std::size_t o = 0; o < view.outer; ++o)
        for (std::size_t i = 0; i < view.inner; ++i) acc += xv[index(o, c, i)];
      mean[c] = acc / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t o = 0; o < view.outer; ++o)
        for (std::size_t i = 0; i < view.inner; ++i) {
          const double d = xv[index(o, c, i)] - mean[c];
          sq += d * d;
        }
      variance[c] = sq / static_cast<double>(count);
      inv_std[c] = 1.0 / std::sqrt(variance[c] + eps);
    }
    if (stats_out != nullptr) {
      stats_out->mean = mean;
      stats_out->variance = variance;
      if (count > 1) stats_out->variance *= static_cast<double>(count) / (count - 1);
    }
  } else {
    STSC_CHECK(running_mean.shape() == Shape{channels} &&
                   running_variance.shape() == Shape{channels},
               ErrorCode::kInvalidArgument, "batchnorm: running statistics must be [{}]",
               channels);
    mean = running_mean;
    for (std::size_t c = 0; c < channels; ++c)
      inv_std[c] = 1.0 / std::sqrt(running_variance[c] + eps);
  }

  Tensor normalized(xv.shape());
  Tensor out(xv.shape());
  for (std::size_t o = 0; o < view.outer; ++o)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t i = 0; i < view.inner; ++i) {
        const std::size_t j = index(o, c, i);
        normalized[j] = (xv[j] - mean[c]) * inv_std[c];
        out[j] = gv[c] * normalized[j] + bv[c];
      }

  return tape.Record(
      std::move(out), {x, gamma, beta},
      [&tape, gamma, view, training, normalized = std::move(normalized),
       inv_std = std::move(inv_std)](const Tensor& g, std::span<Tensor* const> grads) {
        const std::size_t channels = view.extent;
        const std::size_t count = view.outer * view.inner;
        const Tensor& gv = tape.Value(gamma);
        auto index = [&](std::size_t o, std::size_t c, std::size_t i) {
          return (o * channels + c) * view.inner + i;
        };
        for (std::size_t c = 0; c < channels; ++c) {
          double sum_g = 0.0;
          double sum_g_xhat = 0.0;
          for (std::size_t o = 0; o < view.outer; ++o)
            for (std::size_t i = 0; i < view.inner; ++i) {
              const std::size_t j = index(o, c, i);
              sum_g += g[j];
              sum_g_xhat += g[j] * normalized[j];
            }
          if (grads[1] != nullptr) (*grads[1])[c] += sum_g_xhat;
          if (grads[2] != nullptr) (*grads[2])[c] += sum_g;
          if (grads[0] == nullptr) continue;
          const double scale = gv[c] * inv_std[c];
          const double mean_g = sum_g / static_cast<double>(count);
          const double mean_g_xhat = sum_g_xhat / static_cast<double>(count);
          for (std::size_t o = 0; o < view.outer; ++o)
            for (std::size_t i = 0; i < view.inner; ++i) {
              const std::size_t j = index(o, c, i);
              (*grads[0])[j] += training
                                    ? scale * (g[j] - mean_g - normalized[j] * mean_g_xhat)
                                    : scale * g[j];
            }
        }
      },
      "batchnorm");
}

}  // namespace stsc::diff
