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
#include <algorithm>
#include <fstream>
#include <iterator>

#include "common/error.hpp"
#include "events/events.hpp"

namespace stsc::events {

namespace fs = std::filesystem;

std::vector<Event> DecodeNmnistEvents(const std::vector<std::uint8_t>& bytes,
                                      const std::string& source) {
  STSC_CHECK(bytes.size() % 5 == 0, ErrorCode::kCorruptInput,
             "{}: length {} is not a multiple of 5 bytes", source, bytes.size());
  std::vector<Event> events;
  events.reserve(bytes.size() / 5);
  for (std::size_t i = 0; i < bytes.size(); i += 5) {
    Event e;
    e.x = bytes[i];
    e.y = bytes[i + 1];
    e.polarity = static_cast<std::uint8_t>(bytes[i + 2] >> 7);
    e.time_us = (static_cast<std::int64_t>(bytes[i + 2] & 0x7F) << 16) |
                (static_cast<std::int64_t>(bytes[i + 3]) << 8) |
                static_cast<std::int64_t>(bytes[i + 4]);
    STSC_CHECK(e.x < kNmnistSide && e.y < kNmnistSide, ErrorCode::kCorruptInput,
               "{}: event at ({}, {}) outside the {}x{} sensor", source, e.x, e.y,
               kNmnistSide, kNmnistSide);
    events.push_back(e);
  }
  return events;
}

EventStream LoadNmnistSample(const fs::path& file, int label, const LoadOptions& options) {
  std::ifstream in(file, std::ios::binary);
  STSC_CHECK(in.good(), ErrorCode::kIo, "cannot open {}", file.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  EventStream stream;
  stream.spatial_shape = {2, kNmnistSide, kNmnistSide};
  stream.label = label;
  stream.events = DecodeNmnistEvents(bytes, file.string());
  FinalizeStream(stream, options);
  return stream;
}

std::vector<EventStream> LoadNmnist(const fs::path& dir, Split split,
                                    const LoadOptions& options) {
  const fs::path root = dir / (split == Split::kTrain ? "Train" : "Test");
  STSC_CHECK(fs::is_directory(root), ErrorCode::kIo, "N-MNIST directory {} not found",
             root.string());
  std::vector<std::pair<int, fs::path>> files;
  for (int digit = 0; digit < kNmnistClasses; ++digit) {
    const fs::path class_dir = root / std::to_string(digit);
    if (!fs::is_directory(class_dir)) continue;
    for (const auto& entry : fs::directory_iterator(class_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".bin")
        files.emplace_back(digit, entry.path());
    }
  }
  STSC_CHECK(!files.empty(), ErrorCode::kIo, "no N-MNIST .bin files under {}", root.string());
  std::sort(files.begin(), files.end());
  if (options.limit > 0 && files.size() > options.limit) {
    std::vector<std::pair<int, fs::path>> picked;
    const double stride = static_cast<double>(files.size()) / options.limit;
    for (std::size_t i = 0; i < options.limit; ++i)
      picked.push_back(files[static_cast<std::size_t>(i * stride)]);
    files = std::move(picked);
  }
  std::vector<EventStream> streams;
  streams.reserve(files.size());
  for (const auto& [label, path] : files) streams.push_back(LoadNmnistSample(path, label, options));
  return streams;
}

}  // namespace stsc::events
