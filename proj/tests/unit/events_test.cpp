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
#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>

#include "events/events.hpp"
#include "events/frame_cache.hpp"
#include "support/helpers.hpp"
#include "support/synthetic.hpp"

namespace stsc::events {
namespace {

using diff::Shape;
using diff::Tensor;

EventStream OneDimensional(std::size_t units, std::int64_t duration,
                           const std::vector<std::pair<std::int64_t, std::uint32_t>>& events) {
  EventStream s;
  s.spatial_shape = {units};
  s.duration_us = duration;
  for (const auto& [t, u] : events) s.events.push_back({.time_us = t, .unit = u});
  return s;
}

EventStream RandomStream(std::mt19937_64& rng, std::size_t count) {
  EventStream s;
  s.spatial_shape = {2, 5, 4};
  s.duration_us = 1 + static_cast<std::int64_t>(rng() % 100000);
  for (std::size_t i = 0; i < count; ++i)
    s.events.push_back({.time_us = static_cast<std::int64_t>(rng() % s.duration_us),
                        .polarity = static_cast<std::uint8_t>(rng() % 2),
                        .y = static_cast<std::uint16_t>(rng() % 5),
                        .x = static_cast<std::uint16_t>(rng() % 4)});
  std::sort(s.events.begin(), s.events.end(),
            [](const Event& a, const Event& b) { return a.time_us < b.time_us; });
  return s;
}

TEST(AggregateFrames, BinsByDurationOverSteps) {
  const Tensor f = AggregateFrames(OneDimensional(10, 1200000, {{100000, 5}, {150000, 5},
                                                                 {900000, 5}}),
                                   3);
  ASSERT_EQ(f.shape(), (Shape{3, 10}));
  Tensor expected({3, 10});
  expected.at({0, 5}) = 2.0;
  expected.at({2, 5}) = 1.0;
  EXPECT_EQ(f, expected);
}

TEST(AggregateFrames, EmptyStreamIsZero) {
  EXPECT_EQ(AggregateFrames(OneDimensional(10, 1000, {}), 4), Tensor({4, 10}));
}

TEST(AggregateFrames, RightEdgeClampsToLastBin) {
  const Tensor f = AggregateFrames(OneDimensional(2, 1000, {{1000, 1}, {999, 0}}), 4);
  EXPECT_EQ(f.at({3, 1}), 1.0);
  EXPECT_EQ(f.at({3, 0}), 1.0);
}

TEST(AggregateFrames, SingleStepEqualsPerAddressCount) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const EventStream s = RandomStream(rng, rng() % 300);
    std::map<std::size_t, double> counts;
    for (const Event& e : s.events) counts[(e.polarity * 5u + e.y) * 4u + e.x] += 1.0;
    const Tensor f = AggregateFrames(s, 1);
    ASSERT_EQ(f.shape(), (Shape{1, 2, 5, 4}));
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], counts[i]);
  }
}

TEST(AggregateFrames, PreservesEventCount) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const EventStream s = RandomStream(rng, rng() % 500);
    const Tensor f = AggregateFrames(s, 1 + rng() % 20);
    double total = 0.0;
    for (double v : f.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_EQ(v, std::floor(v));
      total += v;
    }
    EXPECT_EQ(total, static_cast<double>(s.events.size()));
  }
}

TEST(AggregateFrames, IndependentOfEventOrder) {
  std::mt19937_64 rng(3);
  EventStream s = RandomStream(rng, 200);
  const Tensor f = AggregateFrames(s, 7);
  std::shuffle(s.events.begin(), s.events.end(), rng);
  EXPECT_EQ(AggregateFrames(s, 7), f);
}

TEST(AggregateFrames, BinSubsetsReconstructStream) {
  std::mt19937_64 rng(4);
  const EventStream s = RandomStream(rng, 150);
  const std::size_t steps = 6;
  std::vector<Event> rebuilt;
  for (std::size_t t = 0; t < steps; ++t)
    for (const Event& e : s.events) {
      EventStream one = s;
      one.events = {e};
      const Tensor f = AggregateFrames(one, steps);
      double in_bin = 0.0;
      for (std::size_t i = t * 40; i < (t + 1) * 40; ++i) in_bin += f[i];
      if (in_bin == 1.0) rebuilt.push_back(e);
    }
  auto key = [](const Event& e) { return std::tuple(e.time_us, e.polarity, e.y, e.x); };
  std::vector<std::tuple<std::int64_t, int, int, int>> a, b;
  for (const Event& e : s.events) a.push_back(key(e));
  for (const Event& e : rebuilt) b.push_back(key(e));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(AggregateFrames, Errors) {
  EXPECT_STSC_ERROR(ErrorCode::kInvalidArgument,
                    AggregateFrames(OneDimensional(10, 100, {}), 0));
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput,
                    AggregateFrames(OneDimensional(10, 100, {{5, 10}}), 2));
}

TEST(Nmnist, DecodesPackedEvent) {
  const auto events = DecodeNmnistEvents({0x03, 0x07, 0x80, 0x00, 0x64}, "inline");
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].x, 3);
  EXPECT_EQ(events[0].y, 7);
  EXPECT_EQ(events[0].polarity, 1);
  EXPECT_EQ(events[0].time_us, 100);
}

TEST(Nmnist, EncodeDecodeRoundTrip) {
  std::mt19937_64 rng(5);
  std::vector<testing::NmnistEvent> in;
  for (int i = 0; i < 100; ++i)
    in.push_back({static_cast<std::uint8_t>(rng() % 34), static_cast<std::uint8_t>(rng() % 34),
                  static_cast<std::uint8_t>(rng() % 2),
                  static_cast<std::uint32_t>(rng() % (1u << 23))});
  const auto out = DecodeNmnistEvents(testing::EncodeNmnist(in), "inline");
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i].x, in[i].x);
    EXPECT_EQ(out[i].y, in[i].y);
    EXPECT_EQ(out[i].polarity, in[i].polarity);
    EXPECT_EQ(out[i].time_us, in[i].time_us);
  }
}

TEST(Nmnist, TruncatedAndEmptyFiles) {
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, DecodeNmnistEvents({1, 2, 3, 4}, "inline"));
  const auto dir = testing::ScratchDir("nmnist_files");
  std::ofstream(dir / "empty.bin", std::ios::binary).flush();
  const EventStream s = LoadNmnistSample(dir / "empty.bin", 4);
  EXPECT_TRUE(s.events.empty());
  EXPECT_EQ(s.label, 4);
  EXPECT_EQ(s.spatial_shape, (Shape{2, 34, 34}));
  {
    std::ofstream out(dir / "short.bin", std::ios::binary);
    out.write("\x01\x02\x03\x04\x05\x06", 6);
  }
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, LoadNmnistSample(dir / "short.bin", 0));
  EXPECT_STSC_ERROR(ErrorCode::kIo, LoadNmnistSample(dir / "missing.bin", 0));
}

TEST(Nmnist, LoadsDirectoryLayout) {
  const auto dir = testing::ScratchDir("nmnist_layout");
  testing::WriteSyntheticNmnist(dir, 2, 6);
  const auto train = LoadNmnist(dir, Split::kTrain);
  ASSERT_EQ(train.size(), 20u);
  std::map<int, int> hist;
  for (const EventStream& s : train) {
    ++hist[s.label];
    for (const Event& e : s.events) {
      EXPECT_LT(e.x, 34);
      EXPECT_LT(e.y, 34);
    }
  }
  for (int d = 0; d < 10; ++d) EXPECT_EQ(hist[d], 2);
  EXPECT_EQ(LoadNmnist(dir, Split::kTest, {.fixed_duration_us = std::nullopt, .limit = 5}).size(), 5u);
}

TEST(Shd, ReadsHdf5Layout) {
  const auto dir = testing::ScratchDir("shd_fixture");
  const std::vector<testing::ShdRecord> records = {
      {{0.10f, 0.15f, 0.90f}, {5, 5, 699}, 3},
      {{}, {}, 19},
      {{0.5f}, {0}, 0},
  };
  testing::WriteShdFile(dir / "shd_train.h5", records);
  const auto streams = LoadShd(dir, Split::kTrain);
  ASSERT_EQ(streams.size(), 3u);
  EXPECT_EQ(streams[0].label, 3);
  EXPECT_EQ(streams[0].spatial_shape, (Shape{700}));
  ASSERT_EQ(streams[0].events.size(), 3u);
  EXPECT_EQ(streams[0].events[2].unit, 699u);
  EXPECT_NEAR(static_cast<double>(streams[0].events[1].time_us), 150000.0, 1.0);
  EXPECT_GT(streams[0].duration_us, streams[0].events[2].time_us);
  EXPECT_TRUE(streams[1].events.empty());
  EXPECT_EQ(streams[1].label, 19);

  const auto fixed = LoadShd(dir / "shd_train.h5", Split::kTrain,
                             {.fixed_duration_us = 200000});
  EXPECT_EQ(fixed[0].duration_us, 200000);
  EXPECT_EQ(fixed[0].events.size(), 2u);
}

TEST(Shd, Errors) {
  const auto dir = testing::ScratchDir("shd_errors");
  EXPECT_STSC_ERROR(ErrorCode::kIo, LoadShd(dir, Split::kTrain));
  testing::WriteShdFile(dir / "shd_train.h5", {{{0.1f}, {700}, 0}});
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, LoadShd(dir, Split::kTrain));
  testing::WriteShdFile(dir / "shd_test.h5", {{{0.1f}, {3}, 20}});
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, LoadShd(dir, Split::kTest));
  {
    std::ofstream out(dir / "junk.h5");
    out << "not hdf5";
  }
  EXPECT_STSC_ERROR(ErrorCode::kIo, LoadShd(dir / "junk.h5", Split::kTrain));
}

TEST(FrameCache, RoundTrip) {
  const auto dir = testing::ScratchDir("frame_cache");
  std::mt19937_64 rng(7);
  Tensor t = testing::RandomTensor(rng, {3, 2, 5}, 0.0, 10.0);
  for (double& v : t.values()) v = std::floor(v);
  WriteFrameCache(dir / "x.bin", t);
  EXPECT_EQ(ReadFrameCache(dir / "x.bin"), t);
  {
    std::ofstream out(dir / "bad.bin", std::ios::binary);
    out << "STSX";
  }
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, ReadFrameCache(dir / "bad.bin"));
}

TEST(FrameDataset, SaveLoadAndBatch) {
  const auto dir = testing::ScratchDir("frame_dataset");
  const FrameDataset data = testing::SyntheticShdFrames(1, 4, 8);
  ASSERT_EQ(data.size(), 20u);
  EXPECT_EQ(data.sample_shape, (Shape{4, 700}));
  SaveFrameDataset(dir, Split::kTrain, data);
  const FrameDataset back = LoadFrameDataset(dir, Split::kTrain);
  EXPECT_EQ(back.sample_shape, data.sample_shape);
  EXPECT_EQ(back.frames, data.frames);
  EXPECT_EQ(back.labels, data.labels);
  const std::vector<std::size_t> idx = {3, 0};
  const Tensor batch = back.Batch(idx);
  ASSERT_EQ(batch.shape(), (Shape{4, 2, 700}));
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t u = 0; u < 700; ++u) {
      EXPECT_EQ(batch.at({t, 0, u}), data.frames[3 * 2800 + t * 700 + u]);
      EXPECT_EQ(batch.at({t, 1, u}), data.frames[t * 700 + u]);
    }
}

TEST(PrepareData, ShdIsIdempotent) {
  const auto raw = testing::ScratchDir("prepare_raw");
  const auto out = testing::ScratchDir("prepare_out");
  testing::WriteSyntheticShd(raw, 2, 1, 9);
  PrepareOptions options;
  options.steps = 5;
  const PrepareReport first = PrepareData(DatasetKind::kShd, raw, out, options);
  EXPECT_FALSE(first.up_to_date);
  EXPECT_EQ(first.train.samples, 40u);
  EXPECT_EQ(first.test.samples, 20u);
  EXPECT_EQ(first.train.sample_shape, (Shape{5, 700}));
  EXPECT_EQ(first.train.label_histogram.size(), 20u);
  EXPECT_TRUE(std::filesystem::exists(ManifestPath(out)));
  const auto stamp = std::filesystem::last_write_time(FramesPath(out, Split::kTrain));
  const PrepareReport second = PrepareData(DatasetKind::kShd, raw, out, options);
  EXPECT_TRUE(second.up_to_date);
  EXPECT_EQ(second.train.samples, 40u);
  EXPECT_EQ(std::filesystem::last_write_time(FramesPath(out, Split::kTrain)), stamp);
  options.steps = 6;
  EXPECT_FALSE(PrepareData(DatasetKind::kShd, raw, out, options).up_to_date);
  EXPECT_EQ(LoadFrameDataset(out, Split::kTest).sample_shape, (Shape{6, 700}));
}

TEST(PrepareData, NmnistShape) {
  const auto raw = testing::ScratchDir("prepare_nmnist_raw");
  const auto out = testing::ScratchDir("prepare_nmnist_out");
  testing::WriteSyntheticNmnist(raw, 1, 10);
  PrepareOptions options;
  options.steps = 10;
  const PrepareReport report = PrepareData(DatasetKind::kNmnist, raw, out, options);
  EXPECT_EQ(report.train.sample_shape, (Shape{10, 2, 34, 34}));
  EXPECT_EQ(report.train.samples, 10u);
}

TEST(PrepareData, MissingRawDirectory) {
  const auto out = testing::ScratchDir("prepare_missing");
  EXPECT_STSC_ERROR(ErrorCode::kIo,
                    PrepareData(DatasetKind::kShd, out / "nope", out / "cache", {}));
}

}  // namespace
}  // namespace stsc::events
