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
#include "events/frame_cache.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace stsc::events {

namespace fs = std::filesystem;

namespace {

void WriteHeader(std::ostream& out, const diff::Shape& shape) {
  out.write(kFrameCacheMagic, sizeof(kFrameCacheMagic));
  io::WriteU32(out, kFrameCacheVersion);
  io::WriteU32(out, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) io::WriteU32(out, static_cast<std::uint32_t>(d));
}

diff::Shape ReadHeader(std::istream& in, const std::string& source) {
  char magic[4] = {};
  in.read(magic, sizeof(magic));
  STSC_CHECK(in.gcount() == 4 && std::equal(magic, magic + 4, kFrameCacheMagic),
             ErrorCode::kCorruptInput, "{}: not a frame cache file", source);
  const std::uint32_t version = io::ReadU32(in, source);
  STSC_CHECK(version == kFrameCacheVersion, ErrorCode::kCorruptInput,
             "{}: unsupported frame cache version {}", source, version);
  const std::uint32_t rank = io::ReadU32(in, source);
  STSC_CHECK(rank >= 1 && rank <= 8, ErrorCode::kCorruptInput, "{}: implausible rank {}",
             source, rank);
  diff::Shape shape(rank);
  for (auto& d : shape) d = io::ReadU32(in, source);
  return shape;
}

std::vector<float> ReadFloats(std::istream& in, std::size_t count, const std::string& source) {
  std::vector<float> values(count);
  for (float& v : values) v = io::ReadF32(in, source);
  return values;
}

}  // namespace

void WriteFrameCache(const fs::path& path, const diff::Tensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  STSC_CHECK(out.good(), ErrorCode::kIo, "cannot open {} for writing", path.string());
  WriteHeader(out, tensor.shape());
  for (double v : tensor.values()) io::WriteF32(out, static_cast<float>(v));
  STSC_CHECK(out.good(), ErrorCode::kIo, "failed writing {}", path.string());
}

diff::Tensor ReadFrameCache(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  STSC_CHECK(in.good(), ErrorCode::kIo, "cannot open frame cache {}", path.string());
  const diff::Shape shape = ReadHeader(in, path.string());
  const std::vector<float> values = ReadFloats(in, diff::NumElements(shape), path.string());
  return diff::Tensor(shape, std::vector<double>(values.begin(), values.end()));
}

diff::Tensor FrameDataset::Batch(std::span<const std::size_t> indices) const {
  const std::size_t steps = sample_shape.at(0);
  const std::size_t frame = SampleSize() / steps;
  diff::Shape shape = {steps, indices.size()};
  shape.insert(shape.end(), sample_shape.begin() + 1, sample_shape.end());
  diff::Tensor batch(shape);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    STSC_CHECK(indices[b] < size(), ErrorCode::kInvalidArgument,
               "sample index {} out of range ({} samples)", indices[b], size());
    const float* src = frames.data() + indices[b] * SampleSize();
    for (std::size_t t = 0; t < steps; ++t) {
      double* dst = batch.data() + (t * indices.size() + b) * frame;
      std::copy_n(src + t * frame, frame, dst);
    }
  }
  return batch;
}

DatasetKind ParseDatasetKind(const std::string& name) {
  if (name == "shd" || name == "SHD") return DatasetKind::kShd;
  if (name == "nmnist" || name == "N-MNIST" || name == "n-mnist") return DatasetKind::kNmnist;
  Fail(ErrorCode::kInvalidArgument, "unknown dataset '{}' (shd, nmnist)", name);
}

const char* DatasetKindName(DatasetKind kind) {
  return kind == DatasetKind::kShd ? "shd" : "nmnist";
}

fs::path FramesPath(const fs::path& dir, Split split) {
  return dir / fmt::format("{}_frames.bin", SplitName(split));
}
fs::path LabelsPath(const fs::path& dir, Split split) {
  return dir / fmt::format("{}_labels.bin", SplitName(split));
}
fs::path ManifestPath(const fs::path& dir) { return dir / "manifest.json"; }

FrameDataset LoadFrameDataset(const fs::path& dir, Split split) {
  const fs::path frames_path = FramesPath(dir, split);
  const fs::path labels_path = LabelsPath(dir, split);
  STSC_CHECK(fs::is_regular_file(frames_path) && fs::is_regular_file(labels_path),
             ErrorCode::kIo, "frame cache for split '{}' not found in {} (run prepare-data)",
             SplitName(split), dir.string());
  FrameDataset data;
  {
    std::ifstream in(frames_path, std::ios::binary);
    const diff::Shape shape = ReadHeader(in, frames_path.string());
    STSC_CHECK(shape.size() >= 3, ErrorCode::kCorruptInput,
               "{}: expected [samples, T, ...], got {}", frames_path.string(),
               diff::ShapeString(shape));
    data.sample_shape.assign(shape.begin() + 1, shape.end());
    data.frames = ReadFloats(in, diff::NumElements(shape), frames_path.string());
  }
  const diff::Tensor labels = ReadFrameCache(labels_path);
  STSC_CHECK(labels.rank() == 1 && labels.size() * data.SampleSize() == data.frames.size(),
             ErrorCode::kCorruptInput, "{}: label count does not match frame count",
             labels_path.string());
  data.labels.reserve(labels.size());
  for (double v : labels.values()) data.labels.push_back(static_cast<int>(v));
  return data;
}

void SaveFrameDataset(const fs::path& dir, Split split, const FrameDataset& data) {
  fs::create_directories(dir);
  {
    const fs::path path = FramesPath(dir, split);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    STSC_CHECK(out.good(), ErrorCode::kIo, "cannot open {} for writing", path.string());
    diff::Shape shape = {data.size()};
    shape.insert(shape.end(), data.sample_shape.begin(), data.sample_shape.end());
    WriteHeader(out, shape);
    for (float v : data.frames) io::WriteF32(out, v);
    STSC_CHECK(out.good(), ErrorCode::kIo, "failed writing {}", path.string());
  }
  diff::Tensor labels({data.size()});
  for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data.labels[i];
  WriteFrameCache(LabelsPath(dir, split), labels);
}

namespace {

nlohmann::json SummaryJson(const SplitSummary& s) {
  nlohmann::json histogram = nlohmann::json::object();
  for (const auto& [label, count] : s.label_histogram) histogram[std::to_string(label)] = count;
  return {{"samples", s.samples}, {"shape", s.sample_shape}, {"label_histogram", histogram}};
}

SplitSummary SummaryFromJson(const nlohmann::json& j) {
  SplitSummary s;
  s.samples = j.at("samples").get<std::size_t>();
  s.sample_shape = j.at("shape").get<diff::Shape>();
  for (const auto& [label, count] : j.at("label_histogram").items())
    s.label_histogram[std::stoi(label)] = count.get<std::size_t>();
  return s;
}

nlohmann::json InputsJson(DatasetKind kind, const fs::path& raw_dir,
                          const PrepareOptions& options) {
  return {{"dataset", DatasetKindName(kind)},
          {"raw_dir", fs::absolute(raw_dir).lexically_normal().string()},
          {"T", options.steps},
          {"fixed_duration_us", options.load.fixed_duration_us.value_or(0)},
          {"train_limit", options.train_limit},
          {"test_limit", options.test_limit},
          {"cache_version", kFrameCacheVersion}};
}

SplitSummary BuildSplit(DatasetKind kind, const fs::path& raw_dir, Split split,
                        const PrepareOptions& options, const fs::path& out_dir) {
  LoadOptions load = options.load;
  load.limit = split == Split::kTrain ? options.train_limit : options.test_limit;
  FrameDataset data;
  auto add = [&](EventStream&& stream) {
    const diff::Tensor frames = AggregateFrames(stream, options.steps);
    if (data.sample_shape.empty()) data.sample_shape = frames.shape();
    data.frames.insert(data.frames.end(), frames.values().begin(), frames.values().end());
    data.labels.push_back(stream.label);
  };
  if (kind == DatasetKind::kShd) {
    ForEachShdSample(raw_dir, split, load, add);
  } else {
    for (EventStream& s : LoadNmnist(raw_dir, split, load)) add(std::move(s));
  }
  SaveFrameDataset(out_dir, split, data);
  SplitSummary summary;
  summary.samples = data.size();
  summary.sample_shape = data.sample_shape;
  for (int label : data.labels) ++summary.label_histogram[label];
  return summary;
}

}  // namespace

PrepareReport PrepareData(DatasetKind kind, const fs::path& raw_dir, const fs::path& out_dir,
                          const PrepareOptions& options) {
  STSC_CHECK(options.steps >= 1, ErrorCode::kInvalidArgument, "frame count T must be >= 1");
  const nlohmann::json inputs = InputsJson(kind, raw_dir, options);
  const fs::path manifest_path = ManifestPath(out_dir);
  if (fs::is_regular_file(manifest_path)) {
    std::ifstream in(manifest_path);
    const nlohmann::json manifest = nlohmann::json::parse(in, nullptr, false);
    const bool caches_present =
        fs::is_regular_file(FramesPath(out_dir, Split::kTrain)) &&
        fs::is_regular_file(FramesPath(out_dir, Split::kTest)) &&
        fs::is_regular_file(LabelsPath(out_dir, Split::kTrain)) &&
        fs::is_regular_file(LabelsPath(out_dir, Split::kTest));
    if (!manifest.is_discarded() && caches_present && manifest.contains("inputs") &&
        manifest["inputs"] == inputs) {
      PrepareReport report;
      report.up_to_date = true;
      report.train = SummaryFromJson(manifest.at("train"));
      report.test = SummaryFromJson(manifest.at("test"));
      return report;
    }
  }
  fs::create_directories(out_dir);
  PrepareReport report;
  report.train = BuildSplit(kind, raw_dir, Split::kTrain, options, out_dir);
  report.test = BuildSplit(kind, raw_dir, Split::kTest, options, out_dir);
  const nlohmann::json manifest = {
      {"inputs", inputs}, {"train", SummaryJson(report.train)}, {"test", SummaryJson(report.test)}};
  std::ofstream out(manifest_path, std::ios::trunc);
  STSC_CHECK(out.good(), ErrorCode::kIo, "cannot write {}", manifest_path.string());
  out << manifest.dump(2) << "\n";
  return report;
}

}  // namespace stsc::events
