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

struct LossOutput {
  diff::Var loss;
  diff::Tensor scores;  // [B, C]
  std::vector<int> predictions;
};

// scores[b, i]: O averaged over time, then over the i-th group of L_out / C
// outputs.
diff::Tensor ClassScores(const diff::Tensor& outputs, std::size_t classes);

// Index of the largest score per row; ties go to the lowest index.
std::vector<int> Predict(const diff::Tensor& scores);

// Sum over classes of squared error against one-hot targets, summed over the
// batch and divided by normalizer (the batch size when 0).
LossOutput VotingMseLoss(diff::Tape& tape, diff::Var outputs, std::span<const int> labels,
                         std::size_t classes, std::size_t normalizer = 0);

}  // namespace stsc::train
