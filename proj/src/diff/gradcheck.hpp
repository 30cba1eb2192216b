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

#include <functional>
#include <span>
#include <vector>

#include "diff/tape.hpp"

namespace stsc::diff {

// Builds the function under test on a fresh tape from leaf inputs.
using CheckedFn = std::function<Var(Tape& tape, std::span<const Var> inputs)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_element = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares tape gradients of <w, f(inputs)>, for fixed weights w, with the
// five-point central difference taken per output element before weighting.
// The error of one element is |a-b| / max(|a|, |b|, 1e-8). Throws
// numeric-error on non-finite output.
GradCheckResult GradCheck(const CheckedFn& fn, const std::vector<Tensor>& inputs,
                          double eps = 1e-4);

}  // namespace stsc::diff
