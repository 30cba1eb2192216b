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
#include "diff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "diff/ops.hpp"

namespace stsc::diff {

namespace {

// Deterministic weights in [0.5, 1.5) for the scalar projection <w, f>.
Tensor ProjectionWeights(const Shape& shape) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ NumElements(shape));
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Tensor w(shape);
  for (double& v : w.values()) v = dist(rng);
  return w;
}

Tensor Evaluate(const CheckedFn& fn, const std::vector<Tensor>& inputs) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Tensor& t : inputs) vars.push_back(tape.Constant(t));
  Tensor value = tape.Value(fn(tape, vars));
  STSC_CHECK(value.AllFinite(), ErrorCode::kNumeric,
             "grad_check: function produced a non-finite value");
  return value;
}

}  // namespace

GradCheckResult GradCheck(const CheckedFn& fn, const std::vector<Tensor>& inputs,
                          double eps) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Tensor& t : inputs) vars.push_back(tape.Leaf(t));
  const Var out = fn(tape, vars);
  STSC_CHECK(tape.Value(out).AllFinite(), ErrorCode::kNumeric,
             "grad_check: function produced a non-finite value");
  const Tensor weights = ProjectionWeights(tape.Value(out).shape());
  tape.Backward(WeightedSum(tape, out, weights));

  GradCheckResult result;
  std::vector<Tensor> probe = inputs;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const Tensor& analytic = tape.Grad(vars[n]);
    for (std::size_t i = 0; i < inputs[n].size(); ++i) {
      const double original = probe[n][i];
      auto at = [&](double offset) {
        probe[n][i] = original + offset;
        return Evaluate(fn, probe);
      };
      const Tensor m2 = at(-2.0 * eps), m1 = at(-eps), p1 = at(eps), p2 = at(2.0 * eps);
      probe[n][i] = original;
      double numeric = 0.0;
      for (std::size_t j = 0; j < weights.size(); ++j)
        numeric += weights[j] * ((m2[j] - p2[j]) + 8.0 * (p1[j] - m1[j])) / (12.0 * eps);
      const double a = analytic[i];
      STSC_CHECK(std::isfinite(a), ErrorCode::kNumeric,
                 "grad_check: non-finite analytic gradient");
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double err = std::abs(a - numeric) / denom;
      if (err > result.max_relative_error) {
        result = {err, n, i, a, numeric};
      }
    }
  }
  return result;
}

}  // namespace stsc::diff
