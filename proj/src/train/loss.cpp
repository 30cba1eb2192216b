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
#include "train/loss.hpp"

#include "common/error.hpp"

namespace stsc::train {

namespace {

struct Dims {
  std::size_t steps, batch, outputs, group;
};

Dims CheckOutputs(const diff::Tensor& o, std::size_t classes) {
  STSC_CHECK(o.rank() == 3, ErrorCode::kInvalidArgument,
             "voting loss expects O as [T, B, L_out], got {}", diff::ShapeString(o.shape()));
  STSC_CHECK(classes > 0 && o.dim(2) % classes == 0, ErrorCode::kInvalidArgument,
             "output width {} is not divisible by {} classes", o.dim(2), classes);
  return {o.dim(0), o.dim(1), o.dim(2), o.dim(2) / classes};
}

}  // namespace

diff::Tensor ClassScores(const diff::Tensor& o, std::size_t classes) {
  const Dims d = CheckOutputs(o, classes);
  diff::Tensor scores({d.batch, classes});
  const double scale = 1.0 / static_cast<double>(d.steps * d.group);
  const double* src = o.data();
  for (std::size_t t = 0; t < d.steps; ++t)
    for (std::size_t b = 0; b < d.batch; ++b) {
      const double* row = src + (t * d.batch + b) * d.outputs;
      for (std::size_t n = 0; n < d.outputs; ++n) scores[b * classes + n / d.group] += row[n];
    }
  scores *= scale;
  return scores;
}

std::vector<int> Predict(const diff::Tensor& scores) {
  STSC_CHECK(scores.rank() == 2, ErrorCode::kInvalidArgument, "scores must be [B, C]");
  const std::size_t classes = scores.dim(1);
  std::vector<int> out(scores.dim(0));
  for (std::size_t b = 0; b < out.size(); ++b) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < classes; ++i)
      if (scores[b * classes + i] > scores[b * classes + best]) best = i;
    out[b] = static_cast<int>(best);
  }
  return out;
}

LossOutput VotingMseLoss(diff::Tape& tape, diff::Var outputs, std::span<const int> labels,
                         std::size_t classes, std::size_t normalizer) {
  const diff::Tensor& o = tape.Value(outputs);
  const Dims d = CheckOutputs(o, classes);
  STSC_CHECK(labels.size() == d.batch, ErrorCode::kInvalidArgument,
             "{} labels for a batch of {}", labels.size(), d.batch);
  for (int label : labels)
    STSC_CHECK(label >= 0 && static_cast<std::size_t>(label) < classes,
               ErrorCode::kInvalidArgument, "label {} outside [0, {})", label, classes);
  const double norm = static_cast<double>(normalizer == 0 ? d.batch : normalizer);

  LossOutput result;
  result.scores = ClassScores(o, classes);
  result.predictions = Predict(result.scores);

  // residual[b, i] = scores - target
  diff::Tensor residual = result.scores;
  for (std::size_t b = 0; b < d.batch; ++b) residual[b * classes + labels[b]] -= 1.0;
  double total = 0.0;
  for (double r : residual.values()) total += r * r;

  const double scale = 2.0 / (norm * static_cast<double>(d.steps * d.group));
  result.loss = tape.Record(
      diff::Tensor({1}, total / norm), {outputs},
      [residual = std::move(residual), d, classes, scale](
          const diff::Tensor& g, std::span<diff::Tensor* const> grads) {
        if (grads[0] == nullptr) return;
        double* out = grads[0]->data();
        const double gs = g[0] * scale;
        for (std::size_t t = 0; t < d.steps; ++t)
          for (std::size_t b = 0; b < d.batch; ++b) {
            double* row = out + (t * d.batch + b) * d.outputs;
            for (std::size_t n = 0; n < d.outputs; ++n)
              row[n] += gs * residual[b * classes + n / d.group];
          }
      },
      "voting_mse");
  return result;
}

}  // namespace stsc::train
