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

#include "train/trainer.hpp"

namespace stsc::train {

// Empty lists keep the base config's value. Modules are trf, fli or both.
struct AblationGrid {
  std::vector<std::string> policies;
  std::vector<std::size_t> trf_kernels;
  std::vector<std::size_t> fli_kernels;
  std::vector<std::string> variants;
  std::vector<std::string> modules;

  std::size_t size() const;
};

// Named grids: policies, kf, kg, variants, modules. Anything else is read as
// "field=v1,v2;field=..." over the fields policy, K_F, K_G, variant, modules.
AblationGrid ParseGrid(const std::string& text);

struct AblationRow {
  std::string policy;
  std::size_t trf_kernel = 0;
  std::size_t fli_kernel = 0;
  std::string variant;
  std::string modules;
  double final_test_acc = 0.0;
  double best_test_acc = 0.0;
};

// The config of every grid point, in row order.
std::vector<TrainConfig> ExpandGrid(const TrainConfig& base, const AblationGrid& grid);

std::string ModulesName(const TrainConfig& config);

// One training run per grid point; each run writes into out_dir/run_<i>, and
// the table goes to out_dir/ablation.csv.
std::vector<AblationRow> Ablate(const TrainConfig& base, const AblationGrid& grid,
                                const TrainData& data, const std::filesystem::path& out_dir,
                                const LogFn& log = {});

std::string AblationCsv(const std::vector<AblationRow>& rows);

}  // namespace stsc::train
