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
#include "support/synthetic.hpp"

#include <hdf5.h>

#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <unistd.h>

namespace stsc::testing {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kUnits = 700;
constexpr std::size_t kBands = 5;
constexpr std::size_t kBandWidth = kUnits / kBands;
constexpr double kDuration = 1.0;

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("HDF5 fixture: " + what);
}

template <typename T>
void WriteVlen(hid_t file, const char* name, hid_t base, const std::vector<std::vector<T>>& rows) {
  std::vector<hvl_t> data(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    data[i] = {rows[i].size(), const_cast<T*>(rows[i].data())};
  const hsize_t dims[1] = {rows.size()};
  const hid_t space = H5Screate_simple(1, dims, nullptr);
  const hid_t type = H5Tvlen_create(base);
  const hid_t set = H5Dcreate2(file, name, type, space, H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT);
  Require(set >= 0, std::string("create ") + name);
  Require(H5Dwrite(set, type, H5S_ALL, H5S_ALL, H5P_DEFAULT, data.data()) >= 0,
          std::string("write ") + name);
  H5Dclose(set);
  H5Tclose(type);
  H5Sclose(space);
}

std::pair<std::size_t, std::size_t> BandsOf(int label) {
  const std::size_t a = static_cast<std::size_t>(label) / (kBands - 1);
  std::size_t b = static_cast<std::size_t>(label) % (kBands - 1);
  if (b >= a) ++b;
  return {a, b};
}

}  // namespace

void WriteShdFile(const fs::path& path, const std::vector<ShdRecord>& records) {
  const hid_t file = H5Fcreate(path.string().c_str(), H5F_ACC_TRUNC, H5P_DEFAULT, H5P_DEFAULT);
  Require(file >= 0, "create " + path.string());
  const hid_t group = H5Gcreate2(file, "spikes", H5P_DEFAULT, H5P_DEFAULT, H5P_DEFAULT);
  H5Gclose(group);
  std::vector<std::vector<float>> times;
  std::vector<std::vector<std::uint16_t>> units;
  std::vector<std::uint16_t> labels;
  for (const ShdRecord& r : records) {
    times.push_back(r.times_s);
    units.push_back(r.units);
    labels.push_back(static_cast<std::uint16_t>(r.label));
  }
  WriteVlen(file, "spikes/times", H5T_NATIVE_FLOAT, times);
  WriteVlen(file, "spikes/units", H5T_NATIVE_UINT16, units);
  const hsize_t dims[1] = {labels.size()};
  const hid_t space = H5Screate_simple(1, dims, nullptr);
  const hid_t set = H5Dcreate2(file, "labels", H5T_STD_U16LE, space, H5P_DEFAULT, H5P_DEFAULT,
                               H5P_DEFAULT);
  Require(set >= 0 && H5Dwrite(set, H5T_NATIVE_UINT16, H5S_ALL, H5S_ALL, H5P_DEFAULT,
                               labels.data()) >= 0,
          "write labels");
  H5Dclose(set);
  H5Sclose(space);
  H5Fclose(file);
}

std::vector<ShdRecord> SyntheticShdRecords(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::poisson_distribution<int> signal(60), noise(40);
  std::vector<ShdRecord> records;
  for (std::size_t k = 0; k < per_class; ++k) {
    for (int label = 0; label < 20; ++label) {
      const auto [a, b] = BandsOf(label);
      std::vector<std::pair<float, std::uint16_t>> spikes;
      const double split = kDuration * (0.4 + 0.2 * unit01(rng));
      auto emit = [&](std::size_t band, double lo, double hi, int count) {
        for (int i = 0; i < count; ++i) {
          const double t = lo + (hi - lo) * unit01(rng);
          const auto u = static_cast<std::uint16_t>(band * kBandWidth + unit01(rng) * kBandWidth);
          spikes.emplace_back(static_cast<float>(t), u);
        }
      };
      emit(a, 0.0, split, signal(rng));
      emit(b, split, kDuration, signal(rng));
      for (int i = noise(rng); i > 0; --i)
        spikes.emplace_back(static_cast<float>(kDuration * unit01(rng)),
                            static_cast<std::uint16_t>(unit01(rng) * kUnits));
      std::sort(spikes.begin(), spikes.end());
      ShdRecord r;
      r.label = label;
      for (const auto& [t, u] : spikes) {
        r.times_s.push_back(t);
        r.units.push_back(u);
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

void WriteSyntheticShd(const fs::path& dir, std::size_t train_per_class,
                       std::size_t test_per_class, std::uint64_t seed) {
  fs::create_directories(dir);
  WriteShdFile(dir / "shd_train.h5", SyntheticShdRecords(train_per_class, seed));
  WriteShdFile(dir / "shd_test.h5", SyntheticShdRecords(test_per_class, seed + 1));
}

events::FrameDataset SyntheticShdFrames(std::size_t per_class, std::size_t steps,
                                        std::uint64_t seed) {
  events::FrameDataset data;
  data.sample_shape = {steps, kUnits};
  for (const ShdRecord& r : SyntheticShdRecords(per_class, seed)) {
    events::EventStream stream;
    stream.spatial_shape = {kUnits};
    stream.label = r.label;
    for (std::size_t i = 0; i < r.units.size(); ++i) {
      events::Event e;
      e.time_us = std::llround(static_cast<double>(r.times_s[i]) * 1e6);
      e.unit = r.units[i];
      stream.events.push_back(e);
    }
    events::FinalizeStream(stream, {});
    const diff::Tensor frames = events::AggregateFrames(stream, steps);
    for (double v : frames.values()) data.frames.push_back(static_cast<float>(v));
    data.labels.push_back(r.label);
  }
  return data;
}

std::vector<std::uint8_t> EncodeNmnist(const std::vector<NmnistEvent>& events) {
  std::vector<std::uint8_t> bytes;
  for (const NmnistEvent& e : events) {
    bytes.push_back(e.x);
    bytes.push_back(e.y);
    bytes.push_back(static_cast<std::uint8_t>((e.polarity << 7) | ((e.time_us >> 16) & 0x7F)));
    bytes.push_back(static_cast<std::uint8_t>((e.time_us >> 8) & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(e.time_us & 0xFF));
  }
  return bytes;
}

void WriteSyntheticNmnist(const fs::path& dir, std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(0, 33), pol(0, 1);
  std::uniform_int_distribution<std::uint32_t> time(0, 300000);
  for (const char* split : {"Train", "Test"}) {
    for (int digit = 0; digit < 10; ++digit) {
      const fs::path class_dir = dir / split / std::to_string(digit);
      fs::create_directories(class_dir);
      for (std::size_t k = 0; k < per_class; ++k) {
        std::vector<NmnistEvent> events(50 + digit * 5);
        for (NmnistEvent& e : events) {
          e.x = static_cast<std::uint8_t>(coord(rng));
          e.y = static_cast<std::uint8_t>(coord(rng));
          e.polarity = static_cast<std::uint8_t>(pol(rng));
          e.time_us = time(rng);
        }
        std::sort(events.begin(), events.end(),
                  [](const auto& l, const auto& r) { return l.time_us < r.time_us; });
        const std::vector<std::uint8_t> bytes = EncodeNmnist(events);
        std::ofstream out(class_dir / (std::to_string(k) + ".bin"), std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
      }
    }
  }
}

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("stsc-test-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace stsc::testing
