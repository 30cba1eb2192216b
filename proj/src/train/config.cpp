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
#include "train/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace stsc::train {

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  STSC_CHECK(ec == std::errc() && ptr == value.data() + value.size(),
             ErrorCode::kInvalidArgument, "config '{}': '{}' is not a valid number", key,
             value);
  return out;
}

double ParseDouble(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  STSC_CHECK(used == value.size() && !value.empty(), ErrorCode::kInvalidArgument,
             "config '{}': '{}' is not a valid number", key, value);
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  Fail(ErrorCode::kInvalidArgument, "config '{}': '{}' is not a boolean", key, value);
}

std::string FormatDouble(double v) { return fmt::format("{}", v); }
std::string FormatBool(bool v) { return v ? "true" : "false"; }

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> kKeys = {
      "dataset", "spec", "policy", "variant", "epochs", "batch_size", "learning_rate", "T",
      "tau", "v_th", "surrogate_alpha", "fire_at_threshold", "detach_reset", "K_F", "K_G",
      "r", "enable_trf", "enable_fli", "causal", "bias", "seed", "precision", "shards",
      "train_limit", "test_limit", "fixed_duration_us", "log_wall_time"};
  return kKeys;
}

void TrainConfig::Set(const std::string& key, const std::string& raw) {
  const std::string value = Trim(raw);
  if (key == "dataset") dataset = value;
  else if (key == "spec") spec = value;
  else if (key == "policy") policy = value;
  else if (key == "variant") variant = value;
  else if (key == "epochs") epochs = ParseNumber<std::size_t>(key, value);
  else if (key == "batch_size") batch_size = ParseNumber<std::size_t>(key, value);
  else if (key == "learning_rate") learning_rate = ParseDouble(key, value);
  else if (key == "T") T = ParseNumber<std::size_t>(key, value);
  else if (key == "tau") tau = ParseDouble(key, value);
  else if (key == "v_th") v_th = ParseDouble(key, value);
  else if (key == "surrogate_alpha") surrogate_alpha = ParseDouble(key, value);
  else if (key == "fire_at_threshold") fire_at_threshold = ParseBool(key, value);
  else if (key == "detach_reset") detach_reset = ParseBool(key, value);
  else if (key == "K_F") K_F = ParseNumber<std::size_t>(key, value);
  else if (key == "K_G") K_G = ParseNumber<std::size_t>(key, value);
  else if (key == "r") r = ParseNumber<std::size_t>(key, value);
  else if (key == "enable_trf") enable_trf = ParseBool(key, value);
  else if (key == "enable_fli") enable_fli = ParseBool(key, value);
  else if (key == "causal") causal = ParseBool(key, value);
  else if (key == "bias") bias = ParseBool(key, value);
  else if (key == "seed") seed = ParseNumber<std::uint64_t>(key, value);
  else if (key == "precision") precision = value;
  else if (key == "shards") shards = ParseNumber<std::size_t>(key, value);
  else if (key == "train_limit") train_limit = ParseNumber<std::size_t>(key, value);
  else if (key == "test_limit") test_limit = ParseNumber<std::size_t>(key, value);
  else if (key == "fixed_duration_us") fixed_duration_us = ParseNumber<std::int64_t>(key, value);
  else if (key == "log_wall_time") log_wall_time = ParseBool(key, value);
  else Fail(ErrorCode::kInvalidArgument, "unknown config field '{}'", key);
}

std::string TrainConfig::Get(const std::string& key) const {
  if (key == "dataset") return dataset;
  if (key == "spec") return spec;
  if (key == "policy") return policy;
  if (key == "variant") return variant;
  if (key == "epochs") return std::to_string(epochs);
  if (key == "batch_size") return std::to_string(batch_size);
  if (key == "learning_rate") return FormatDouble(learning_rate);
  if (key == "T") return std::to_string(T);
  if (key == "tau") return FormatDouble(tau);
  if (key == "v_th") return FormatDouble(v_th);
  if (key == "surrogate_alpha") return FormatDouble(surrogate_alpha);
  if (key == "fire_at_threshold") return FormatBool(fire_at_threshold);
  if (key == "detach_reset") return FormatBool(detach_reset);
  if (key == "K_F") return std::to_string(K_F);
  if (key == "K_G") return std::to_string(K_G);
  if (key == "r") return std::to_string(r);
  if (key == "enable_trf") return FormatBool(enable_trf);
  if (key == "enable_fli") return FormatBool(enable_fli);
  if (key == "causal") return FormatBool(causal);
  if (key == "bias") return FormatBool(bias);
  if (key == "seed") return std::to_string(seed);
  if (key == "precision") return precision;
  if (key == "shards") return std::to_string(shards);
  if (key == "train_limit") return std::to_string(train_limit);
  if (key == "test_limit") return std::to_string(test_limit);
  if (key == "fixed_duration_us") return std::to_string(fixed_duration_us);
  if (key == "log_wall_time") return FormatBool(log_wall_time);
  Fail(ErrorCode::kInvalidArgument, "unknown config field '{}'", key);
}

void TrainConfig::Validate() const {
  STSC_CHECK(epochs > 0 && batch_size > 0 && T > 0 && shards > 0, ErrorCode::kInvalidArgument,
             "epochs, batch_size, T and shards must be positive");
  STSC_CHECK(learning_rate > 0.0, ErrorCode::kInvalidArgument,
             "learning_rate must be positive, got {}", learning_rate);
  STSC_CHECK(K_F % 2 == 1 && K_G % 2 == 1, ErrorCode::kInvalidArgument,
             "K_F and K_G must be odd, got {} and {}", K_F, K_G);
  STSC_CHECK(r >= 1, ErrorCode::kInvalidArgument, "r must be >= 1");
  STSC_CHECK(precision == "f64", ErrorCode::kInvalidArgument,
             "precision '{}' is not supported; computation is 64-bit (f64)", precision);
  STSC_CHECK(fixed_duration_us >= 0, ErrorCode::kInvalidArgument,
             "fixed_duration_us must be >= 0");
  SampleShapeFor(dataset);
  net::ParseAblationKind(variant);
  BuildOptions(*this).lif.Validate();
}

std::string TrainConfig::Render() const {
  std::string out;
  for (const std::string& key : ConfigKeys()) out += fmt::format("{} = {}\n", key, Get(key));
  return out;
}

TrainConfig DefaultsFor(const std::string& dataset) {
  TrainConfig c;
  if (dataset == "shd") return c;
  if (dataset == "nmnist") {
    c.dataset = "nmnist";
    c.spec = "Input-128C3-AP2-128C3-AP2-0.5DP-2048FC-0.5DP-100FC-Voting-10";
    c.policy = "P12";
    c.epochs = 300;
    c.batch_size = 16;
    c.learning_rate = 1e-3;
    c.T = 10;
    c.tau = 2.0;
    c.v_th = 1.0;
    c.K_F = 3;
    c.K_G = 3;
    c.r = 1;
    return c;
  }
  if (dataset == "cifar10dvs") {
    c.dataset = "cifar10dvs";
    c.spec =
        "Input-64C3-128C3-AP2-256C3-256C3-AP2-512C3-512C3-AP2-512C3-512C3-AP2-100FC-"
        "Voting-10";
    c.policy = "P12345678";
    c.epochs = 1000;
    c.batch_size = 16;
    c.learning_rate = 1e-3;
    c.T = 10;
    c.tau = 2.0;
    c.v_th = 1.0;
    c.K_F = 3;
    c.K_G = 3;
    c.r = 2;
    return c;
  }
  if (dataset == "dvs128") {
    c.dataset = "dvs128";
    c.spec =
        "Input-128C3-MP2-128C3-MP2-128C3-MP2-128C3-MP2-128C3-MP2-0.5DP-512FC-0.5DP-110FC-"
        "Voting-11";
    c.policy = "P12345";
    c.epochs = 1000;
    c.batch_size = 16;
    c.learning_rate = 1e-3;
    c.T = 20;
    c.tau = 2.0;
    c.v_th = 1.0;
    c.K_F = 3;
    c.K_G = 5;
    c.r = 2;
    return c;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown dataset '{}' (shd, nmnist, cifar10dvs, dvs128)",
       dataset);
}

TrainConfig ParseConfigText(const std::string& text, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    STSC_CHECK(eq != std::string::npos, ErrorCode::kInvalidArgument,
               "{}:{}: expected 'key = value'", source, line_no);
    entries.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  TrainConfig config;
  for (const auto& [key, value] : entries)
    if (key == "dataset") config = DefaultsFor(value);
  for (const auto& [key, value] : entries) {
    try {
      config.Set(key, value);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}: {}", source, e.what()));
    }
  }
  return config;
}

TrainConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  STSC_CHECK(in.good(), ErrorCode::kIo, "cannot open config file {}", path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigText(buffer.str(), path.string());
}

void ApplyOverride(TrainConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  STSC_CHECK(eq != std::string::npos, ErrorCode::kInvalidArgument,
             "override '{}' must look like key=value", assignment);
  config.Set(Trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

net::NetworkSpec BuildSpec(const TrainConfig& config) {
  net::NetworkSpec spec = net::ParseSpec(config.spec);
  spec.stsc_points = net::ParsePolicy(config.policy, spec.SpatialOpCount());
  spec.stsc.trf_kernel = config.K_F;
  spec.stsc.fli_kernel = config.K_G;
  spec.stsc.reduction = config.r;
  spec.stsc.enable_trf = config.enable_trf;
  spec.stsc.enable_fli = config.enable_fli;
  spec.stsc.padding =
      config.causal ? diff::TemporalPadding::kCausal : diff::TemporalPadding::kSymmetric;
  if (!spec.stsc_points.empty()) spec.stsc.Validate();
  const net::AblationKind kind = net::ParseAblationKind(config.variant);
  if (kind != net::AblationKind::kSnn) spec = net::AblationVariant(std::move(spec), kind);
  return spec;
}

net::NetworkOptions BuildOptions(const TrainConfig& config) {
  net::NetworkOptions options;
  options.lif.tau = config.tau;
  options.lif.v_th = config.v_th;
  options.lif.surrogate_alpha = config.surrogate_alpha;
  options.lif.fire_at_threshold = config.fire_at_threshold;
  options.lif.detach_reset = config.detach_reset;
  options.bias = config.bias;
  return options;
}

diff::Shape SampleShapeFor(const std::string& dataset) {
  if (dataset == "shd") return {700};
  if (dataset == "nmnist") return {2, 34, 34};
  if (dataset == "cifar10dvs") return {2, 128, 128};
  if (dataset == "dvs128") return {2, 128, 128};
  Fail(ErrorCode::kInvalidArgument, "unknown dataset '{}'", dataset);
}

}  // namespace stsc::train
