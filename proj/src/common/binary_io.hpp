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

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "common/error.hpp"

// Explicit little-endian encoding of the on-disk formats.
namespace stsc::io {

inline void WriteU32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes = {
      static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
      static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes.data(), bytes.size());
}

inline void WriteF32(std::ostream& out, float v) {
  WriteU32(out, std::bit_cast<std::uint32_t>(v));
}

inline std::uint32_t ReadU32(std::istream& in, const std::string& source) {
  std::array<unsigned char, 4> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  STSC_CHECK(in.gcount() == 4, ErrorCode::kCorruptInput, "{}: unexpected end of file",
             source);
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

inline float ReadF32(std::istream& in, const std::string& source) {
  return std::bit_cast<float>(ReadU32(in, source));
}

}  // namespace stsc::io
