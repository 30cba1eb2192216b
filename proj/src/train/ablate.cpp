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
#include "train/ablate.hpp"

#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace stsc::train {

namespace {

std::vector<std::string> SplitList(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t ParseSize(const std::string& text) {
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  STSC_CHECK(used == text.size() && !text.empty(), ErrorCode::kInvalidArgument,
             "grid value '{}' is not a non-negative integer", text);
  return value;
}

void ApplyModules(TrainConfig& config, const std::string& modules) {
  if (modules == "both") {
    config.enable_trf = config.enable_fli = true;
  } else if (modules == "trf") {
    config.enable_trf = true;
    config.enable_fli = false;
  } else if (modules == "fli") {
    config.enable_trf = false;
    config.enable_fli = true;
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown module set '{}' (trf, fli, both)", modules);
  }
}

}  // namespace

std::size_t AblationGrid::size() const {
  auto n = [](std::size_t k) { return k == 0 ? std::size_t{1} : k; };
  return n(policies.size()) * n(trf_kernels.size()) * n(fli_kernels.size()) *
         n(variants.size()) * n(modules.size());
}

AblationGrid ParseGrid(const std::string& text) {
  AblationGrid grid;
  if (text == "policies") {
    grid.policies = net::FcInsertionPolicies();
  } else if (text == "kf") {
    grid.trf_kernels = {1, 3, 5, 7, 9, 11};
  } else if (text == "kg") {
    grid.fli_kernels = {1, 3, 5, 7, 9, 11};
  } else if (text == "variants") {
    grid.variants = {"fcs-non", "fcs-relu", "snn"};
    grid.policies = {"none", "P1"};
  } else if (text == "modules") {
    grid.modules = {"trf", "fli", "both"};
  } else {
    for (const std::string& clause : SplitList(text, ';')) {
      const auto eq = clause.find('=');
      STSC_CHECK(eq != std::string::npos, ErrorCode::kInvalidArgument,
                 "grid clause '{}' must look like field=v1,v2", clause);
      const std::string field = clause.substr(0, eq);
      const std::vector<std::string> values = SplitList(clause.substr(eq + 1), ',');
      STSC_CHECK(!values.empty(), ErrorCode::kInvalidArgument, "grid field '{}' has no values",
                 field);
      if (field == "policy") {
        grid.policies = values;
      } else if (field == "K_F") {
        for (const std::string& v : values) grid.trf_kernels.push_back(ParseSize(v));
      } else if (field == "K_G") {
        for (const std::string& v : values) grid.fli_kernels.push_back(ParseSize(v));
      } else if (field == "variant") {
        grid.variants = values;
      } else if (field == "modules") {
        grid.modules = values;
      } else {
        Fail(ErrorCode::kInvalidArgument,
             "unknown grid field '{}' (policy, K_F, K_G, variant, modules)", field);
      }
    }
  }
  STSC_CHECK(grid.size() > 0, ErrorCode::kInvalidArgument, "empty ablation grid");
  return grid;
}

std::string ModulesName(const TrainConfig& config) {
  if (config.enable_trf && config.enable_fli) return "both";
  if (config.enable_trf) return "trf";
  if (config.enable_fli) return "fli";
  return "none";
}

std::vector<TrainConfig> ExpandGrid(const TrainConfig& base, const AblationGrid& grid) {
  auto or_base = [](const auto& list, const auto& value) {
    using T = std::decay_t<decltype(value)>;
    return list.empty() ? std::vector<T>{value} : std::vector<T>(list.begin(), list.end());
  };
  const auto policies = or_base(grid.policies, base.policy);
  const auto kfs = or_base(grid.trf_kernels, base.K_F);
  const auto kgs = or_base(grid.fli_kernels, base.K_G);
  const auto variants = or_base(grid.variants, base.variant);
  const auto modules = or_base(grid.modules, ModulesName(base));

  std::vector<TrainConfig> out;
  for (const std::string& variant : variants)
    for (const std::string& module_set : modules)
      for (const std::string& policy : policies)
        for (std::size_t kf : kfs)
          for (std::size_t kg : kgs) {
            TrainConfig c = base;
            c.variant = variant;
            c.policy = policy;
            c.K_F = kf;
            c.K_G = kg;
            if (module_set != "none") ApplyModules(c, module_set);
            c.Validate();
            BuildSpec(c);
            out.push_back(c);
          }
  return out;
}

std::string AblationCsv(const std::vector<AblationRow>& rows) {
  std::string out = "policy,K_F,K_G,variant,modules,final_test_acc,best_test_acc\n";
  for (const AblationRow& r : rows)
    out += fmt::format("{},{},{},{},{},{:.17g},{:.17g}\n", r.policy, r.trf_kernel,
                       r.fli_kernel, r.variant, r.modules, r.final_test_acc, r.best_test_acc);
  return out;
}

std::vector<AblationRow> Ablate(const TrainConfig& base, const AblationGrid& grid,
                                const TrainData& data, const std::filesystem::path& out_dir,
                                const LogFn& log) {
  const std::vector<TrainConfig> configs = ExpandGrid(base, grid);
  std::vector<AblationRow> rows;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const TrainConfig& c = configs[i];
    if (log)
      log(fmt::format("[{}/{}] policy={} K_F={} K_G={} variant={} modules={}", i + 1,
                      configs.size(), c.policy, c.K_F, c.K_G, c.variant, ModulesName(c)));
    const std::filesystem::path run_dir =
        out_dir.empty() ? std::filesystem::path() : out_dir / fmt::format("run_{:03}", i);
    const TrainResult result = Train(c, data, run_dir);
    rows.push_back({c.policy, c.K_F, c.K_G, c.variant, ModulesName(c), result.final_test_acc,
                    result.best_test_acc});
    if (log)
      log(fmt::format("  final {:.4f} best {:.4f}", result.final_test_acc,
                      result.best_test_acc));
    if (!out_dir.empty()) {
      std::ofstream csv(out_dir / "ablation.csv", std::ios::trunc);
      STSC_CHECK(csv.good(), ErrorCode::kIo, "cannot write {}",
                 (out_dir / "ablation.csv").string());
      csv << AblationCsv(rows);
    }
  }
  return rows;
}

}  // namespace stsc::train
