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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diff/tensor.hpp"

namespace stsc::events {

// One event. 1-D streams use unit; 3-D streams use (polarity, y, x).
struct Event {
  std::int64_t time_us = 0;
  std::uint32_t unit = 0;
  std::uint8_t polarity = 0;
  std::uint16_t y = 0;
  std::uint16_t x = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventStream {
  std::vector<Event> events;    // non-decreasing time
  diff::Shape spatial_shape;    // {N} or {C, H, W}
  std::int64_t duration_us = 0; // every event time is < duration (== is clamped)
  int label = 0;

  bool IsOneDimensional() const { return spatial_shape.size() == 1; }
  // Row-major index of the event address inside spatial_shape; throws
  // corrupt-input when the address is out of bounds.
  std::size_t FlatAddress(const Event& e) const;
};

// Dense [T, spatial...] frames; with accumulate aggregation each element
// counts the events that fell into that bin.
using FrameTensor = diff::Tensor;

enum class Aggregation { kAccumulate };

// Bin t collects events with time in [t*dt, (t+1)*dt), dt = duration / T,
// computed exactly as time * T / duration in integers. An event at exactly
// the duration lands in the last bin.
FrameTensor AggregateFrames(const EventStream& stream, std::size_t steps,
                            Aggregation mode = Aggregation::kAccumulate);

enum class Split { kTrain, kTest };
Split ParseSplit(const std::string& name);
const char* SplitName(Split split);

struct LoadOptions {
  // When set, every sample spans this window and later events are dropped.
  // Otherwise the window is the last event time + 1 us.
  std::optional<std::int64_t> fixed_duration_us;
  std::size_t limit = 0;  // 0 loads every sample
};

inline constexpr std::size_t kShdUnits = 700;
inline constexpr int kShdClasses = 20;

// path is either an SHD .h5 file or a directory holding shd_train.h5 and
// shd_test.h5.
std::vector<EventStream> LoadShd(const std::filesystem::path& path, Split split,
                                 const LoadOptions& options = {});
// Streams samples in file order without holding the whole split; returns the
// number of samples visited.
std::size_t ForEachShdSample(const std::filesystem::path& path, Split split,
                             const LoadOptions& options,
                             const std::function<void(EventStream&&)>& visit);
std::filesystem::path ShdFile(const std::filesystem::path& dir, Split split);

inline constexpr std::size_t kNmnistSide = 34;
inline constexpr int kNmnistClasses = 10;

// Decodes N-MNIST 5-byte events: x, y, then polarity in the top bit followed
// by a 23-bit microsecond timestamp.
std::vector<Event> DecodeNmnistEvents(const std::vector<std::uint8_t>& bytes,
                                      const std::string& source);
EventStream LoadNmnistSample(const std::filesystem::path& file, int label,
                             const LoadOptions& options = {});
// dir holds Train/<digit>/*.bin and Test/<digit>/*.bin.
std::vector<EventStream> LoadNmnist(const std::filesystem::path& dir, Split split,
                                    const LoadOptions& options = {});

// Sets duration per LoadOptions and sorts events by time (stable).
void FinalizeStream(EventStream& stream, const LoadOptions& options);

}  // namespace stsc::events
