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
#include "train/adam.hpp"

#include <cmath>

#include "common/error.hpp"

namespace stsc::train {

void AdamStep(std::span<diff::Parameter* const> params, AdamState& state,
              double learning_rate, const AdamOptions& options) {
  if (state.m.empty()) {
    for (const diff::Parameter* p : params) {
      state.m.push_back(diff::Tensor::ZerosLike(p->value));
      state.v.push_back(diff::Tensor::ZerosLike(p->value));
    }
  }
  STSC_CHECK(state.m.size() == params.size(), ErrorCode::kState,
             "optimizer state holds {} parameters, got {}", state.m.size(), params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    STSC_CHECK(state.m[i].shape() == params[i]->value.shape(), ErrorCode::kState,
               "optimizer moment shape mismatch for '{}'", params[i]->name);
    STSC_CHECK(params[i]->grad.AllFinite(), ErrorCode::kNumeric,
               "non-finite gradient in parameter '{}'", params[i]->name);
  }

  ++state.step;
  const double step = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, step);
  const double c2 = 1.0 - std::pow(options.beta2, step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* w = params[i]->value.data();
    const double* g = params[i]->grad.data();
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    for (std::size_t k = 0; k < params[i]->value.size(); ++k) {
      m[k] = options.beta1 * m[k] + (1.0 - options.beta1) * g[k];
      v[k] = options.beta2 * v[k] + (1.0 - options.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      w[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

}  // namespace stsc::train
