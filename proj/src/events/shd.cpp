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
#include <cmath>
#include <functional>

#include <hdf5.h>

#include "common/error.hpp"
#include "events/events.hpp"

namespace stsc::events {

namespace fs = std::filesystem;

namespace {

// Owns one HDF5 identifier.
class H5Handle {
 public:
  H5Handle(hid_t id, herr_t (*close)(hid_t)) : id_(id), close_(close) {}
  ~H5Handle() {
    if (id_ >= 0) close_(id_);
  }
  H5Handle(const H5Handle&) = delete;
  H5Handle& operator=(const H5Handle&) = delete;

  hid_t get() const { return id_; }
  bool ok() const { return id_ >= 0; }

 private:
  hid_t id_;
  herr_t (*close_)(hid_t);
};

constexpr std::size_t kChunk = 256;

hsize_t DatasetLength(hid_t dataset) {
  H5Handle space(H5Dget_space(dataset), H5Sclose);
  hsize_t dims[1] = {0};
  STSC_CHECK(space.ok() && H5Sget_simple_extent_ndims(space.get()) == 1,
             ErrorCode::kCorruptInput, "SHD dataset is not one-dimensional");
  H5Sget_simple_extent_dims(space.get(), dims, nullptr);
  return dims[0];
}

// Reads rows [start, start+count) of a 1-D variable-length dataset, calling
// fn(row, values) for each row.
template <typename T, typename Fn>
void ReadVlenRows(hid_t dataset, hid_t base_type, hsize_t start, hsize_t count,
                  const std::string& source, Fn&& fn) {
  H5Handle memtype(H5Tvlen_create(base_type), H5Tclose);
  H5Handle filespace(H5Dget_space(dataset), H5Sclose);
  const hsize_t offset[1] = {start};
  const hsize_t extent[1] = {count};
  H5Sselect_hyperslab(filespace.get(), H5S_SELECT_SET, offset, nullptr, extent, nullptr);
  H5Handle memspace(H5Screate_simple(1, extent, nullptr), H5Sclose);
  std::vector<hvl_t> rows(count);
  STSC_CHECK(H5Dread(dataset, memtype.get(), memspace.get(), filespace.get(), H5P_DEFAULT,
                     rows.data()) >= 0,
             ErrorCode::kCorruptInput, "{}: failed to read variable-length rows", source);
  for (hsize_t i = 0; i < count; ++i) {
    fn(start + i, static_cast<const T*>(rows[i].p), rows[i].len);
  }
  H5Dvlen_reclaim(memtype.get(), memspace.get(), H5P_DEFAULT, rows.data());
}

}  // namespace

fs::path ShdFile(const fs::path& dir, Split split) {
  return dir / (split == Split::kTrain ? "shd_train.h5" : "shd_test.h5");
}

std::size_t ForEachShdSample(const fs::path& path, Split split, const LoadOptions& options,
                             const std::function<void(EventStream&&)>& visit) {
  const fs::path file = fs::is_directory(path) ? ShdFile(path, split) : path;
  const std::string source = file.string();
  STSC_CHECK(fs::is_regular_file(file), ErrorCode::kIo, "SHD file {} not found", source);
  H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr);

  H5Handle h5(H5Fopen(source.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose);
  STSC_CHECK(h5.ok(), ErrorCode::kIo, "{}: not a readable HDF5 file", source);
  H5Handle times(H5Dopen2(h5.get(), "spikes/times", H5P_DEFAULT), H5Dclose);
  H5Handle units(H5Dopen2(h5.get(), "spikes/units", H5P_DEFAULT), H5Dclose);
  H5Handle labels(H5Dopen2(h5.get(), "labels", H5P_DEFAULT), H5Dclose);
  STSC_CHECK(times.ok() && units.ok() && labels.ok(), ErrorCode::kCorruptInput,
             "{}: missing spikes/times, spikes/units or labels", source);

  const hsize_t samples = DatasetLength(labels.get());
  STSC_CHECK(DatasetLength(times.get()) == samples && DatasetLength(units.get()) == samples,
             ErrorCode::kCorruptInput, "{}: spikes and labels disagree on sample count",
             source);

  std::vector<int> label_values(samples);
  STSC_CHECK(H5Dread(labels.get(), H5T_NATIVE_INT, H5S_ALL, H5S_ALL, H5P_DEFAULT,
                     label_values.data()) >= 0,
             ErrorCode::kCorruptInput, "{}: failed to read labels", source);

  std::vector<bool> keep(samples, true);
  if (options.limit > 0 && options.limit < samples) {
    keep.assign(samples, false);
    const double stride = static_cast<double>(samples) / options.limit;
    for (std::size_t i = 0; i < options.limit; ++i) keep[static_cast<hsize_t>(i * stride)] = true;
  }

  std::size_t visited = 0;
  std::vector<EventStream> chunk;
  for (hsize_t start = 0; start < samples; start += kChunk) {
    const hsize_t count = std::min<hsize_t>(kChunk, samples - start);
    chunk.assign(count, EventStream{});
    ReadVlenRows<double>(times.get(), H5T_NATIVE_DOUBLE, start, count, source,
                         [&](hsize_t row, const double* values, std::size_t len) {
                           EventStream& s = chunk[row - start];
                           s.spatial_shape = {kShdUnits};
                           s.events.resize(len);
                           for (std::size_t i = 0; i < len; ++i) {
                             STSC_CHECK(std::isfinite(values[i]) && values[i] >= 0.0,
                                        ErrorCode::kCorruptInput,
                                        "{}: sample {} has spike time {}", source, row,
                                        values[i]);
                             s.events[i].time_us = std::llround(values[i] * 1e6);
                           }
                         });
    ReadVlenRows<std::uint32_t>(
        units.get(), H5T_NATIVE_UINT32, start, count, source,
        [&](hsize_t row, const std::uint32_t* values, std::size_t len) {
          EventStream& s = chunk[row - start];
          STSC_CHECK(len == s.events.size(), ErrorCode::kCorruptInput,
                     "{}: sample {} has {} times but {} units", source, row,
                     s.events.size(), len);
          for (std::size_t i = 0; i < len; ++i) {
            STSC_CHECK(values[i] < kShdUnits, ErrorCode::kCorruptInput,
                       "{}: sample {} has unit index {} >= {}", source, row, values[i],
                       kShdUnits);
            s.events[i].unit = values[i];
          }
        });
    for (hsize_t i = 0; i < count; ++i) {
      const hsize_t row = start + i;
      STSC_CHECK(label_values[row] >= 0 && label_values[row] < kShdClasses,
                 ErrorCode::kCorruptInput, "{}: sample {} has label {}", source, row,
                 label_values[row]);
      if (!keep[row]) continue;
      EventStream& s = chunk[i];
      s.label = label_values[row];
      FinalizeStream(s, options);
      visit(std::move(s));
      ++visited;
    }
  }
  return visited;
}

std::vector<EventStream> LoadShd(const fs::path& path, Split split, const LoadOptions& options) {
  std::vector<EventStream> streams;
  ForEachShdSample(path, split, options,
                   [&streams](EventStream&& s) { streams.push_back(std::move(s)); });
  return streams;
}

}  // namespace stsc::events
