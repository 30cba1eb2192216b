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

#include <span>
#include <vector>

#include "diff/tape.hpp"

namespace stsc::train {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<diff::Tensor> m;
  std::vector<diff::Tensor> v;
  std::size_t step = 0;
};

// Bias-corrected Adam update of every parameter from its grad. Moments are
// created on the first call. A non-finite gradient is a numeric-error.
void AdamStep(std::span<diff::Parameter* const> params, AdamState& state,
              double learning_rate, const AdamOptions& options = {});

}  // namespace stsc::train
