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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "diff/tensor.hpp"
#include "events/events.hpp"

namespace stsc::events {

// Little-endian: "STSC" | version u32 | rank u32 | dims u32 x rank | f32 data
// in row-major order.
inline constexpr char kFrameCacheMagic[4] = {'S', 'T', 'S', 'C'};
inline constexpr std::uint32_t kFrameCacheVersion = 1;

void WriteFrameCache(const std::filesystem::path& path, const diff::Tensor& tensor);
diff::Tensor ReadFrameCache(const std::filesystem::path& path);

// Frames of one split held as 32-bit floats: sample i occupies
// frames[i * SampleSize() ...] with shape sample_shape = [T, spatial...].
struct FrameDataset {
  diff::Shape sample_shape;
  std::vector<float> frames;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t SampleSize() const { return diff::NumElements(sample_shape); }
  std::size_t steps() const { return sample_shape.at(0); }
  diff::Shape SpatialShape() const {
    return diff::Shape(sample_shape.begin() + 1, sample_shape.end());
  }

  // [T, B, spatial...] batch of the given samples.
  diff::Tensor Batch(std::span<const std::size_t> indices) const;
};

enum class DatasetKind { kShd, kNmnist };
DatasetKind ParseDatasetKind(const std::string& name);
const char* DatasetKindName(DatasetKind kind);

std::filesystem::path FramesPath(const std::filesystem::path& dir, Split split);
std::filesystem::path LabelsPath(const std::filesystem::path& dir, Split split);
std::filesystem::path ManifestPath(const std::filesystem::path& dir);

FrameDataset LoadFrameDataset(const std::filesystem::path& dir, Split split);
void SaveFrameDataset(const std::filesystem::path& dir, Split split,
                      const FrameDataset& data);

struct PrepareOptions {
  std::size_t steps = 15;
  LoadOptions load;
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
};

struct SplitSummary {
  std::size_t samples = 0;
  diff::Shape sample_shape;
  std::map<int, std::size_t> label_histogram;
};

struct PrepareReport {
  bool up_to_date = false;
  SplitSummary train;
  SplitSummary test;
};

// Aggregates the raw dataset into frame caches under out_dir and writes
// manifest.json. A second call with the same inputs is a no-op.
PrepareReport PrepareData(DatasetKind kind, const std::filesystem::path& raw_dir,
                          const std::filesystem::path& out_dir,
                          const PrepareOptions& options);

}  // namespace stsc::events
