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
#include "events/events.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace stsc::events {

std::size_t EventStream::FlatAddress(const Event& e) const {
  if (spatial_shape.size() == 1) {
    STSC_CHECK(e.unit < spatial_shape[0], ErrorCode::kCorruptInput,
               "event unit {} outside {} units", e.unit, spatial_shape[0]);
    return e.unit;
  }
  STSC_CHECK(spatial_shape.size() == 3, ErrorCode::kInvalidArgument,
             "spatial shape must be (N) or (C, H, W), got {}",
             diff::ShapeString(spatial_shape));
  STSC_CHECK(e.polarity < spatial_shape[0] && e.y < spatial_shape[1] &&
                 e.x < spatial_shape[2],
             ErrorCode::kCorruptInput, "event address (p={}, y={}, x={}) outside {}",
             e.polarity, e.y, e.x, diff::ShapeString(spatial_shape));
  return (static_cast<std::size_t>(e.polarity) * spatial_shape[1] + e.y) * spatial_shape[2] +
         e.x;
}

FrameTensor AggregateFrames(const EventStream& stream, std::size_t steps, Aggregation mode) {
  STSC_CHECK(steps >= 1, ErrorCode::kInvalidArgument, "frame count T must be >= 1");
  STSC_CHECK(mode == Aggregation::kAccumulate, ErrorCode::kInvalidArgument,
             "only accumulate aggregation is supported");
  diff::Shape shape = {steps};
  shape.insert(shape.end(), stream.spatial_shape.begin(), stream.spatial_shape.end());
  FrameTensor frames(shape);
  const std::size_t frame = diff::NumElements(stream.spatial_shape);
  if (stream.events.empty()) return frames;
  STSC_CHECK(stream.duration_us > 0, ErrorCode::kCorruptInput,
             "event stream with {} events has zero duration", stream.events.size());
  const auto T = static_cast<std::int64_t>(steps);
  for (const Event& e : stream.events) {
    STSC_CHECK(e.time_us >= 0 && e.time_us <= stream.duration_us, ErrorCode::kCorruptInput,
               "event time {} us outside [0, {}]", e.time_us, stream.duration_us);
    const std::int64_t bin = std::min(e.time_us * T / stream.duration_us, T - 1);
    frames[static_cast<std::size_t>(bin) * frame + stream.FlatAddress(e)] += 1.0;
  }
  return frames;
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  Fail(ErrorCode::kInvalidArgument, "unknown split '{}' (train, test)", name);
}

const char* SplitName(Split split) { return split == Split::kTrain ? "train" : "test"; }

void FinalizeStream(EventStream& stream, const LoadOptions& options) {
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.time_us < b.time_us; });
  if (options.fixed_duration_us) {
    const std::int64_t window = *options.fixed_duration_us;
    STSC_CHECK(window > 0, ErrorCode::kInvalidArgument,
               "fixed duration must be positive, got {}", window);
    std::erase_if(stream.events, [window](const Event& e) { return e.time_us >= window; });
    stream.duration_us = window;
    return;
  }
  stream.duration_us = stream.events.empty() ? 0 : stream.events.back().time_us + 1;
}

}  // namespace stsc::events
