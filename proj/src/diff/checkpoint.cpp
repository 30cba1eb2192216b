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
#include "diff/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace stsc::diff {

void SaveCheckpoint(const std::filesystem::path& path,
                    const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  STSC_CHECK(out.good(), ErrorCode::kIo, "cannot open {} for writing", path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  io::WriteU32(out, kCheckpointVersion);
  io::WriteU32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const NamedTensor& t : tensors) {
    io::WriteU32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    io::WriteU32(out, static_cast<std::uint32_t>(t.value.rank()));
    for (std::size_t d : t.value.shape()) io::WriteU32(out, static_cast<std::uint32_t>(d));
    for (double v : t.value.values()) io::WriteF32(out, static_cast<float>(v));
  }
  STSC_CHECK(out.good(), ErrorCode::kIo, "failed writing {}", path.string());
}

std::vector<NamedTensor> LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  STSC_CHECK(in.good(), ErrorCode::kIo, "cannot open checkpoint {}", path.string());
  const std::string source = path.string();
  char magic[4] = {};
  in.read(magic, sizeof(magic));
  STSC_CHECK(in.gcount() == 4 && std::equal(magic, magic + 4, kCheckpointMagic),
             ErrorCode::kCorruptInput, "{}: not a checkpoint file", source);
  const std::uint32_t version = io::ReadU32(in, source);
  STSC_CHECK(version == kCheckpointVersion, ErrorCode::kCorruptInput,
             "{}: unsupported checkpoint version {}", source, version);
  const std::uint32_t count = io::ReadU32(in, source);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    NamedTensor t;
    const std::uint32_t name_len = io::ReadU32(in, source);
    STSC_CHECK(name_len < (1u << 16), ErrorCode::kCorruptInput,
               "{}: implausible name length {}", source, name_len);
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    STSC_CHECK(in.gcount() == name_len, ErrorCode::kCorruptInput,
               "{}: unexpected end of file", source);
    const std::uint32_t rank = io::ReadU32(in, source);
    STSC_CHECK(rank <= 8, ErrorCode::kCorruptInput, "{}: implausible rank {}", source, rank);
    Shape shape(rank);
    for (auto& d : shape) d = io::ReadU32(in, source);
    t.value = Tensor(shape);
    for (double& v : t.value.values()) v = io::ReadF32(in, source);
    tensors.push_back(std::move(t));
  }
  return tensors;
}

Tensor RoundToCheckpointPrecision(const Tensor& t) {
  Tensor out = t;
  for (double& v : out.values()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

}  // namespace stsc::diff
