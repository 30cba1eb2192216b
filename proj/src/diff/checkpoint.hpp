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

#include <filesystem>
#include <string>
#include <vector>

#include "diff/tensor.hpp"

namespace stsc::diff {

struct NamedTensor {
  std::string name;
  Tensor value;
};

// Little-endian layout:
//   "STCK" | version u32 | count u32 |
//   count x { name_len u32 | name bytes | rank u32 | dims u32 x rank | f32 data }
inline constexpr char kCheckpointMagic[4] = {'S', 'T', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::filesystem::path& path,
                    const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> LoadCheckpoint(const std::filesystem::path& path);

// Rounds every element through float32, the precision checkpoints store.
Tensor RoundToCheckpointPrecision(const Tensor& t);

}  // namespace stsc::diff
