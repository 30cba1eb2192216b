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
#include <CLI11.hpp>
#include <fmt/core.h>

#include "support/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Writes synthetic raw datasets in the SHD and N-MNIST layouts"};
  std::string dataset = "shd";
  std::string out;
  std::size_t train_per_class = 16;
  std::size_t test_per_class = 4;
  std::uint64_t seed = 1;
  app.add_option("--dataset", dataset, "shd or nmnist")->check(CLI::IsMember({"shd", "nmnist"}));
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--train-per-class", train_per_class);
  app.add_option("--test-per-class", test_per_class);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);
  try {
    std::filesystem::create_directories(out);
    if (dataset == "shd")
      stsc::testing::WriteSyntheticShd(out, train_per_class, test_per_class, seed);
    else
      stsc::testing::WriteSyntheticNmnist(out, train_per_class, seed);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  fmt::print("wrote synthetic {} data to {}\n", dataset, out);
  return 0;
}
