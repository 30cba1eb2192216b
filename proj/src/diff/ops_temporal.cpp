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

#include "common/error.hpp"
#include "diff/eigen_maps.hpp"
#include "diff/ops.hpp"

namespace stsc::diff {

int FirstTapOffset(std::size_t kernel_size, TemporalPadding padding) {
  STSC_CHECK(kernel_size % 2 == 1, ErrorCode::kInvalidArgument,
             "temporal kernel size must be odd, got {}", kernel_size);
  if (padding == TemporalPadding::kCausal) return 0;
  return -static_cast<int>((kernel_size - 1) / 2);
}

namespace {

// x viewed as [T, outer, C, inner].
struct DepthwiseGeometry {
  std::size_t steps = 0;
  std::size_t outer = 1;
  std::size_t channels = 0;
  std::size_t inner = 1;
  std::size_t taps = 0;
  int offset = 0;

  std::size_t Frame() const { return outer * channels * inner; }
};

DepthwiseGeometry DepthwiseShape(const Shape& x, const Shape& w,
                                 std::size_t channel_axis, TemporalPadding padding) {
  STSC_CHECK(x.size() >= 2 && channel_axis >= 1 && channel_axis < x.size(),
             ErrorCode::kInvalidArgument,
             "depthwise temporal conv: bad input shape {} for channel axis {}",
             ShapeString(x), channel_axis);
  STSC_CHECK(w.size() == 2 && w[1] == x[channel_axis], ErrorCode::kInvalidArgument,
             "depthwise temporal conv: kernel {} does not match {} channels",
             ShapeString(w), x[channel_axis]);
  DepthwiseGeometry geo;
  geo.steps = x[0];
  for (std::size_t i = 1; i < channel_axis; ++i) geo.outer *= x[i];
  geo.channels = x[channel_axis];
  for (std::size_t i = channel_axis + 1; i < x.size(); ++i) geo.inner *= x[i];
  geo.taps = w[0];
  geo.offset = FirstTapOffset(geo.taps, padding);
  return geo;
}

// Calls fn(t, s, k) for every output step t, source step s = t - (k + offset)
// inside [0, T), and tap k.
template <typename Fn>
void ForEachTap(std::size_t steps, std::size_t taps, int offset, Fn&& fn) {
  const auto T = static_cast<long>(steps);
  for (std::size_t k = 0; k < taps; ++k) {
    const long shift = static_cast<long>(k) + offset;
    const long t_begin = std::max(0L, shift);
    const long t_end = std::min(T, T + shift);
    for (long t = t_begin; t < t_end; ++t) {
      fn(static_cast<std::size_t>(t), static_cast<std::size_t>(t - shift), k);
    }
  }
}

Var DepthwiseTConv(Tape& tape, Var x, Var weight, std::size_t channel_axis,
                   TemporalPadding padding, const char* name) {
  const Tensor& xv = tape.Value(x);
  const Tensor& wv = tape.Value(weight);
  const DepthwiseGeometry geo = DepthwiseShape(xv.shape(), wv.shape(), channel_axis, padding);
  Tensor out = DepthwiseTemporalConvForward(xv, wv, channel_axis, padding);
  return tape.Record(
      std::move(out), {x, weight},
      [&tape, x, weight, geo](const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& xv = tape.Value(x);
        const Tensor& wv = tape.Value(weight);
        const std::size_t frame = geo.Frame();
        ForEachTap(geo.steps, geo.taps, geo.offset, [&](std::size_t t, std::size_t s,
                                                        std::size_t k) {
          const double* go = g.data() + t * frame;
          for (std::size_t o = 0; o < geo.outer; ++o) {
            for (std::size_t c = 0; c < geo.channels; ++c) {
              const std::size_t base = (o * geo.channels + c) * geo.inner;
              const double wkc = wv[k * geo.channels + c];
              if (grads[0] != nullptr) {
                double* gx = grads[0]->data() + s * frame + base;
                for (std::size_t i = 0; i < geo.inner; ++i) gx[i] += wkc * go[base + i];
              }
              if (grads[1] != nullptr) {
                const double* xs = xv.data() + s * frame + base;
                double acc = 0.0;
                for (std::size_t i = 0; i < geo.inner; ++i) acc += xs[i] * go[base + i];
                (*grads[1])[k * geo.channels + c] += acc;
              }
            }
          }
        });
      },
      name);
}

}  // namespace

Tensor DepthwiseTemporalConvForward(const Tensor& x, const Tensor& weight,
                                    std::size_t channel_axis,
                                    TemporalPadding padding) {
  const DepthwiseGeometry geo =
      DepthwiseShape(x.shape(), weight.shape(), channel_axis, padding);
  Tensor out(x.shape());
  const std::size_t frame = geo.Frame();
  ForEachTap(geo.steps, geo.taps, geo.offset,
             [&](std::size_t t, std::size_t s, std::size_t k) {
               const double* xs = x.data() + s * frame;
               double* ot = out.data() + t * frame;
               for (std::size_t o = 0; o < geo.outer; ++o) {
                 for (std::size_t c = 0; c < geo.channels; ++c) {
                   const std::size_t base = (o * geo.channels + c) * geo.inner;
                   const double wkc = weight[k * geo.channels + c];
                   for (std::size_t i = 0; i < geo.inner; ++i)
                     ot[base + i] += wkc * xs[base + i];
                 }
               }
             });
  return out;
}

Var DepthwiseTConv1d(Tape& tape, Var x, Var weight, TemporalPadding padding) {
  const std::size_t rank = tape.Value(x).rank();
  STSC_CHECK(rank >= 2, ErrorCode::kInvalidArgument,
             "depthwise_tconv1d expects [T, ..., N], got {}",
             ShapeString(tape.Value(x).shape()));
  return DepthwiseTConv(tape, x, weight, rank - 1, padding, "depthwise_tconv1d");
}

Var DepthwiseTConv3d(Tape& tape, Var x, Var weight, TemporalPadding padding) {
  const std::size_t rank = tape.Value(x).rank();
  STSC_CHECK(rank >= 4, ErrorCode::kInvalidArgument,
             "depthwise_tconv3d expects [T, ..., C, H, W], got {}",
             ShapeString(tape.Value(x).shape()));
  return DepthwiseTConv(tape, x, weight, rank - 3, padding, "depthwise_tconv3d");
}

namespace {

struct MixGeometry {
  std::size_t steps = 0;
  std::size_t batch = 1;  // product of the axes between time and features
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t taps = 0;
  int offset = 0;
};

MixGeometry MixShape(const Shape& x, const Shape& w, TemporalPadding padding) {
  STSC_CHECK(x.size() >= 2, ErrorCode::kInvalidArgument,
             "tconv1d_mix expects [T, ..., N], got {}", ShapeString(x));
  STSC_CHECK(w.size() == 3 && w[1] == x.back(), ErrorCode::kInvalidArgument,
             "tconv1d_mix: kernel {} does not match input {}", ShapeString(w),
             ShapeString(x));
  MixGeometry geo;
  geo.steps = x[0];
  for (std::size_t i = 1; i + 1 < x.size(); ++i) geo.batch *= x[i];
  geo.in = w[1];
  geo.out = w[2];
  geo.taps = w[0];
  geo.offset = FirstTapOffset(geo.taps, padding);
  return geo;
}

// Time range [t_begin, t_end) of outputs fed by tap k; sources start at
// t_begin - shift.
struct TapSpan {
  long t_begin;
  long count;
  long shift;
};

TapSpan SpanForTap(const MixGeometry& geo, std::size_t k) {
  const auto T = static_cast<long>(geo.steps);
  const long shift = static_cast<long>(k) + geo.offset;
  const long t_begin = std::max(0L, shift);
  const long t_end = std::min(T, T + shift);
  return {t_begin, std::max(0L, t_end - t_begin), shift};
}

}  // namespace

Tensor TConv1dMixForward(const Tensor& x, const Tensor& weight, TemporalPadding padding) {
  const MixGeometry geo = MixShape(x.shape(), weight.shape(), padding);
  Shape out_shape = x.shape();
  out_shape.back() = geo.out;
  Tensor out(out_shape);
  const auto in = static_cast<Eigen::Index>(geo.in);
  const auto m = static_cast<Eigen::Index>(geo.out);
  const auto B = static_cast<long>(geo.batch);
  for (std::size_t k = 0; k < geo.taps; ++k) {
    const TapSpan span = SpanForTap(geo, k);
    if (span.count == 0) continue;
    const Eigen::Index rows = span.count * B;
    AsMatrix(out.data() + span.t_begin * B * m, rows, m).noalias() +=
        AsMatrix(x.data() + (span.t_begin - span.shift) * B * in, rows, in) *
        AsMatrix(weight.data() + k * geo.in * geo.out, in, m);
  }
  return out;
}

Var TConv1dMix(Tape& tape, Var x, Var weight, TemporalPadding padding) {
  const MixGeometry geo = MixShape(tape.Value(x).shape(), tape.Value(weight).shape(), padding);
  Tensor out = TConv1dMixForward(tape.Value(x), tape.Value(weight), padding);
  return tape.Record(
      std::move(out), {x, weight},
      [&tape, x, weight, geo](const Tensor& g, std::span<Tensor* const> grads) {
        const Tensor& xv = tape.Value(x);
        const Tensor& wv = tape.Value(weight);
        const auto in = static_cast<Eigen::Index>(geo.in);
        const auto m = static_cast<Eigen::Index>(geo.out);
        const auto B = static_cast<long>(geo.batch);
        for (std::size_t k = 0; k < geo.taps; ++k) {
          const TapSpan span = SpanForTap(geo, k);
          if (span.count == 0) continue;
          const Eigen::Index rows = span.count * B;
          auto g_rows = AsMatrix(g.data() + span.t_begin * B * m, rows, m);
          const long src = (span.t_begin - span.shift) * B * in;
          if (grads[0] != nullptr) {
            AsMatrix(grads[0]->data() + src, rows, in).noalias() +=
                g_rows * AsMatrix(wv.data() + k * geo.in * geo.out, in, m).transpose();
          }
          if (grads[1] != nullptr) {
            AsMatrix(grads[1]->data() + k * geo.in * geo.out, in, m).noalias() +=
                AsMatrix(xv.data() + src, rows, in).transpose() * g_rows;
          }
        }
      },
      "tconv1d_mix");
}

}  // namespace stsc::diff
