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

#include <cstddef>
#include <random>

#include "diff/tape.hpp"
#include "diff/tensor.hpp"

// Differentiable primitives. Every op records its forward value together with
// a closed-form vector-Jacobian map on the tape.
namespace stsc::diff {

// Temporal kernels store taps 0..K-1. Tap k weights X(t - (k + offset)) where
// offset is -(K-1)/2 for symmetric padding (tap 0 looks (K-1)/2 frames into
// the future) and 0 for causal padding (tap k looks k frames into the past).
enum class TemporalPadding { kSymmetric, kCausal };

int FirstTapOffset(std::size_t kernel_size, TemporalPadding padding);

enum class PoolKind { kMax, kAvg };

// --- dense algebra ---------------------------------------------------------

// a [m,k] x b [k,n] -> [m,n]
Var MatMul(Tape& tape, Var a, Var b);
// x [..., in] x weight [in, out] (+ bias [out]) -> [..., out]. Pass an invalid
// Var to skip the bias.
Var Linear(Tape& tape, Var x, Var weight, Var bias);

Var Add(Tape& tape, Var a, Var b);
Var Mul(Tape& tape, Var a, Var b);
Var Scale(Tape& tape, Var x, double factor);
Var Sigmoid(Tape& tape, Var x);
Var Relu(Tape& tape, Var x);
Var Reshape(Tape& tape, Var x, Shape shape);
Var Sum(Tape& tape, Var x);
// Sum of x * weights, where weights is a constant of the same shape.
Var WeightedSum(Tape& tape, Var x, Tensor weights);

// --- temporal convolutions (axis 0 is time) ---------------------------------

// x [T, ..., C, inner...], weight [K, C]; the kernel for channel c is shared
// over every other axis. Output has the shape of x.
Tensor DepthwiseTemporalConvForward(const Tensor& x, const Tensor& weight,
                                    std::size_t channel_axis,
                                    TemporalPadding padding);
// x [T, ..., N], channel axis is the last one.
Var DepthwiseTConv1d(Tape& tape, Var x, Var weight,
                     TemporalPadding padding = TemporalPadding::kSymmetric);
// x [T, ..., C, H, W], channel axis is rank-3.
Var DepthwiseTConv3d(Tape& tape, Var x, Var weight,
                     TemporalPadding padding = TemporalPadding::kSymmetric);

// x [T, ..., N], weight [K, N, M] -> [T, ..., M]
Tensor TConv1dMixForward(const Tensor& x, const Tensor& weight,
                         TemporalPadding padding);
Var TConv1dMix(Tape& tape, Var x, Var weight,
               TemporalPadding padding = TemporalPadding::kSymmetric);

// --- spatial ops -------------------------------------------------------------

// 3x3 cross-correlation, stride 1, zero padding 1.
// x [B, C_in, H, W], weight [C_out, C_in, 3, 3], bias [C_out] or invalid.
Var Conv2d(Tape& tape, Var x, Var weight, Var bias);
// Window 2, stride 2 over the last two axes; odd trailing rows/cols dropped.
Var Pool2d(Tape& tape, Var x, PoolKind kind);
// [..., C, H, W] -> [..., C]
Var SpatialAvg(Tape& tape, Var x);
// [..., C] -> [..., C, height, width]
Var BroadcastSpatial(Tape& tape, Var x, std::size_t height, std::size_t width);

// --- regularisation / normalisation -----------------------------------------

// Inverted dropout; a fresh Bernoulli mask per element (so per timestep).
// Identity when training is false or p == 0.
Var Dropout(Tape& tape, Var x, double p, bool training, std::mt19937_64& rng);

struct BatchNormStats {
  Tensor mean;      // per channel
  Tensor variance;  // per channel, unbiased
};

// Normalises each channel over every other axis jointly (batch, time and
// space). In training mode uses batch statistics and, when stats_out is set,
// reports them to the caller.
Var BatchNorm(Tape& tape, Var x, Var gamma, Var beta, std::size_t channel_axis,
              bool training, const Tensor& running_mean,
              const Tensor& running_variance, double eps,
              BatchNormStats* stats_out);

}  // namespace stsc::diff
