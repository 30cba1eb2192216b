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

#include <gtest/gtest.h>

#include <optional>
#include <random>

#include "common/error.hpp"
#include "diff/tensor.hpp"

namespace stsc::testing {

inline diff::Tensor RandomTensor(std::mt19937_64& rng, diff::Shape shape, double lo = -1.0,
                                 double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  diff::Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

inline std::size_t RandomSize(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Code of the stsc::Error thrown by fn, or nullopt when nothing is thrown.
template <typename Fn>
std::optional<ErrorCode> ErrorOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace stsc::testing

#define EXPECT_STSC_ERROR(code, expr) \
  EXPECT_EQ(::stsc::testing::ErrorOf([&] { (void)(expr); }), std::optional(code))
