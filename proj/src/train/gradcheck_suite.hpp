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
#include <string>
#include <vector>

namespace stsc::train {

inline constexpr double kGradCheckTolerance = 1e-5;

struct GradCheckSuiteOptions {
  std::size_t seeds = 20;
  double tolerance = kGradCheckTolerance;
  // Adds a check whose backward is deliberately wrong; the suite must fail.
  bool inject_fault = false;
  // Substring filter on check names; empty runs all.
  std::string filter;
};

struct GradCheckLine {
  std::string name;
  std::size_t seeds = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

struct GradCheckReport {
  std::vector<GradCheckLine> lines;
  bool passed() const;
  std::string Render() const;
};

std::vector<std::string> GradCheckNames();

GradCheckReport RunGradCheckSuite(const GradCheckSuiteOptions& options = {});

}  // namespace stsc::train
