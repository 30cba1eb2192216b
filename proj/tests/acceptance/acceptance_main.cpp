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
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <random>
#include <thread>

#include "common/error.hpp"
#include "diff/ops.hpp"
#include "events/frame_cache.hpp"
#include "net/network.hpp"
#include "neuron/lif.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "synapse/stsc.hpp"
#include "train/config.hpp"
#include "train/gradcheck_suite.hpp"
#include "train/loss.hpp"
#include "train/trainer.hpp"

namespace stsc::acceptance {
namespace {

namespace fs = std::filesystem;
using diff::Shape;
using diff::Tape;
using diff::TemporalPadding;
using diff::Tensor;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

struct Settings {
  fs::path data_root;
  fs::path out_dir = "acceptance-runs";
  bool short_mode = false;
  std::size_t shards = 1;
};

Outcome Verdict(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

Tensor Random(std::mt19937_64& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

std::size_t Between(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void Log(const std::string& line) { fmt::print(stderr, "  {}\n", line); }

// --- 1 ----------------------------------------------------------------------

Outcome GradientCorrectness(const Settings&) {
  train::GradCheckSuiteOptions options;
  options.seeds = 20;
  options.tolerance = 1e-5;
  const train::GradCheckReport report = train::RunGradCheckSuite(options);
  const std::vector<std::string> required = {
      "matmul",        "linear",         "add",         "mul",
      "sigmoid",       "relu",           "tconv1d",     "tconv3d",
      "tconv1d_mix",   "conv2d",         "maxpool2d",   "avgpool2d",
      "spatial_avg",   "broadcast_spatial", "dropout",  "batchnorm_train",
      "lif_relaxed",   "stsc_1d",        "stsc_3d",     "voting_mse"};
  std::vector<std::string> missing;
  for (const std::string& name : required)
    if (std::none_of(report.lines.begin(), report.lines.end(),
                     [&](const train::GradCheckLine& l) { return l.name == name; }))
      missing.push_back(name);
  double worst = 0.0;
  std::string worst_name;
  std::size_t min_seeds = options.seeds;
  for (const auto& line : report.lines) {
    min_seeds = std::min(min_seeds, line.seeds);
    if (line.max_relative_error >= worst) {
      worst = line.max_relative_error;
      worst_name = line.name;
    }
  }
  const bool ok = report.passed() && missing.empty() && min_seeds >= 20;
  return Verdict(ok, fmt::format("{} checks, >= {} seeds each, max_rel_err={:.3e} ({}) < 1e-5{}",
                                 report.lines.size(), min_seeds, worst, worst_name,
                                 missing.empty() ? "" : ", missing checks")); 
}

// --- 2 ----------------------------------------------------------------------

Outcome OracleEquivalence(const Settings&) {
  std::mt19937_64 rng(2024);
  double worst1 = 0.0, worst3 = 0.0, worst_mix = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto padding = trial % 2 ? TemporalPadding::kCausal : TemporalPadding::kSymmetric;
    {
      const std::size_t t = Between(rng, 1, 9), b = Between(rng, 1, 3), n = Between(rng, 1, 8);
      const std::size_t k = 2 * Between(rng, 0, 3) + 1;
      const Tensor x = Random(rng, {t, b, n}), w = Random(rng, {k, n});
      Tape tape;
      const Tensor got =
          tape.Value(diff::DepthwiseTConv1d(tape, tape.Constant(x), tape.Constant(w), padding));
      worst1 = std::max(worst1, diff::MaxAbsDiff(got, testing::DepthwiseOracle(x, w, b, n, 1, padding)));
    }
    {
      const std::size_t t = Between(rng, 1, 7), b = Between(rng, 1, 2), c = Between(rng, 1, 4);
      const std::size_t h = Between(rng, 1, 5), w = Between(rng, 1, 5);
      const std::size_t k = 2 * Between(rng, 0, 2) + 1;
      const Tensor x = Random(rng, {t, b, c, h, w}), kernel = Random(rng, {k, c});
      Tape tape;
      const Tensor got = tape.Value(
          diff::DepthwiseTConv3d(tape, tape.Constant(x), tape.Constant(kernel), padding));
      worst3 = std::max(
          worst3, diff::MaxAbsDiff(got, testing::DepthwiseOracle(x, kernel, b, c, h * w, padding)));
    }
    {
      const std::size_t t = Between(rng, 1, 8), b = Between(rng, 1, 3), n = Between(rng, 1, 6);
      const std::size_t m = Between(rng, 1, 6), k = 2 * Between(rng, 0, 2) + 1;
      const Tensor x = Random(rng, {t, b, n}), w = Random(rng, {k, n, m});
      Tape tape;
      const Tensor got =
          tape.Value(diff::TConv1dMix(tape, tape.Constant(x), tape.Constant(w), padding));
      worst_mix = std::max(worst_mix, diff::MaxAbsDiff(got, testing::MixOracle(x, w, padding)));
    }
  }
  const double worst = std::max({worst1, worst3, worst_mix});
  return Verdict(worst <= 1e-12,
                 fmt::format("50 shapes each: tconv1d {:.1e}, tconv3d {:.1e}, tconv1d_mix {:.1e} "
                             "<= 1e-12",
                             worst1, worst3, worst_mix));
}

// --- 3 ----------------------------------------------------------------------

Outcome HandValues(const Settings&) {
  constexpr double kTol = 1e-9;
  std::vector<std::string> failed;

  neuron::LifConfig lif;
  lif.tau = 2.0;
  lif.v_th = 1.0;
  const neuron::LifTrace trace = neuron::LifForward(Tensor({3, 1}, 0.6), lif);
  if (trace.spikes != Tensor({3, 1}, {0.0, 0.0, 1.0}) ||
      diff::MaxAbsDiff(trace.membrane, Tensor({3, 1}, {0.6, 0.9, 1.05})) > kTol)
    failed.push_back("lif");

  Tape tape;
  const Tensor trf = tape.Value(synapse::TrfForward(
      tape, tape.Constant(Tensor({4, 1}, {1.0, 0.0, 2.0, 0.0})),
      tape.Constant(Tensor({3, 1}, {0.5, 1.0, 0.25})), synapse::Variant::kDense1d));
  if (diff::MaxAbsDiff(trf, Tensor({4, 1}, {1.0, 1.25, 2.0, 0.5})) > kTol) failed.push_back("trf");

  const Tensor fli = tape.Value(synapse::FliForward(
      tape, tape.Constant(Tensor({2, 1}, {1.0, 0.0})), tape.Constant(Tensor({1, 1, 1}, 1.0)),
      tape.Constant(Tensor({1, 1}, 2.0)), synapse::Variant::kDense1d));
  if (std::abs(fli[0] - 0.880797) > 5e-7 || std::abs(fli[1] - 0.5) > kTol)
    failed.push_back("fli");

  const std::vector<int> label = {1};
  const double loss =
      tape.Value(train::VotingMseLoss(tape, tape.Constant(Tensor({1, 1, 4}, {1, 0, 1, 1})), label, 2)
                     .loss)[0];
  if (std::abs(loss - 0.25) > kTol) failed.push_back("loss");

  return Verdict(failed.empty(),
                 fmt::format("lif spikes [{}, {}, {}], trf [{}, {}, {}, {}], fli [{:.6f}, {}], "
                             "loss {}{}",
                             trace.spikes[0], trace.spikes[1], trace.spikes[2], trf[0], trf[1],
                             trf[2], trf[3], fli[0], fli[1], loss,
                             failed.empty() ? "" : fmt::format(" (mismatch: {})",
                                                               fmt::join(failed, ", "))));
}

// --- 4 ----------------------------------------------------------------------

Outcome StructuralInvariants(const Settings&) {
  std::mt19937_64 rng(4);
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* name) {
    if (!ok && std::find(failed.begin(), failed.end(), name) == failed.end())
      failed.push_back(name);
  };
  for (int seed = 0; seed < 20; ++seed) {
    const std::size_t n = Between(rng, 1, 6), m = Between(rng, 1, 4);
    const std::size_t t = Between(rng, 1, 8), b = Between(rng, 1, 3);
    const Tensor x = Random(rng, {t, b, n}, -4.0, 4.0);
    const Tensor w1 = Random(rng, {3, n, m}), w2 = Random(rng, {m, n});
    const Tensor wf = Random(rng, {5, n});
    Tape tape;
    const diff::Var xv = tape.Constant(x);
    const Tensor d = tape.Value(synapse::FliForward(tape, xv, tape.Constant(w1),
                                                    tape.Constant(w2), synapse::Variant::kDense1d));
    for (double v : d.values()) check(v > 0.0 && v < 1.0, "fli-range");

    const std::size_t c = Between(rng, 1, 3), h = Between(rng, 2, 4), wd = Between(rng, 2, 4);
    const Tensor x3 = Random(rng, {t, b, c, h, wd});
    const Tensor d3 = tape.Value(synapse::FliForward(
        tape, tape.Constant(x3), tape.Constant(Random(rng, {3, c, 2})),
        tape.Constant(Random(rng, {2, c})), synapse::Variant::kConv3d));
    for (std::size_t p = 0; p < d3.size(); p += h * wd)
      for (std::size_t i = 1; i < h * wd; ++i) check(d3[p + i] == d3[p], "3d-gate-constant");

    Tensor delta({5, n});
    for (std::size_t k = 0; k < n; ++k) delta.at({2, k}) = 1.0;
    const Tensor same = tape.Value(synapse::TrfForward(tape, xv, tape.Constant(delta),
                                                       synapse::Variant::kDense1d));
    check(same == x, "trf-identity");

    synapse::StscConfig cfg;
    cfg.enable_fli = false;
    synapse::StscBlock block("b", n, cfg, rng);
    const Tensor y = tape.Value(block.Forward(tape, xv));
    const Tensor trf_only = tape.Value(synapse::TrfForward(
        tape, xv, tape.Constant(block.trf_kernel()->value), synapse::Variant::kDense1d));
    check(y == trf_only, "y-equals-c");

    neuron::LifConfig lif;
    lif.tau = 1.0 + 9.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    lif.v_th = 0.3;
    const neuron::LifTrace trace = neuron::LifForward(x, lif);
    for (double s : trace.spikes.values()) check(s == 0.0 || s == 1.0, "spikes-binary");

    const std::size_t classes = Between(rng, 1, 20), group = Between(rng, 1, 6);
    const Tensor vote = net::VotingMatrix(classes, classes * group);
    for (std::size_t i = 0; i < classes; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < classes * group; ++j) sum += vote.at({i, j});
      check(std::abs(sum - 1.0) <= 1e-12, "voting-rows");
    }
  }
  return Verdict(failed.empty(),
                 failed.empty() ? "fli in (0,1), 3-D gate constant, identity TRF bit-exact, Y=C "
                                  "without FLI, binary spikes, voting rows sum to 1 (20 seeds)"
                                : fmt::format("violated: {}", fmt::join(failed, ", ")));
}

// --- 8 ----------------------------------------------------------------------

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome Determinism(const Settings& settings) {
  train::TrainConfig config = train::DefaultsFor("shd");
  config.T = 8;
  config.epochs = 3;
  config.batch_size = 16;
  config.learning_rate = 1e-3;
  config.K_G = 1;
  config.r = 10;
  config.seed = 5;
  config.log_wall_time = false;
  const train::TrainData data{testing::SyntheticShdFrames(3, config.T, 31),
                              testing::SyntheticShdFrames(1, config.T, 32)};
  const fs::path dir = settings.out_dir / "determinism";
  fs::remove_all(dir);
  train::Train(config, data, dir / "run_a");
  train::Train(config, data, dir / "run_b");
  const std::string a = ReadFile(dir / "run_a" / "metrics.csv");
  const std::string b = ReadFile(dir / "run_b" / "metrics.csv");
  return Verdict(!a.empty() && a == b,
                 fmt::format("metrics.csv {} bytes, runs {}", a.size(),
                             a == b ? "bitwise identical" : "differ"));
}

// --- 5, 6, 7 ----------------------------------------------------------------

std::optional<fs::path> RawDir(const Settings& settings, const std::string& dataset,
                               std::string& why) {
  if (settings.data_root.empty()) {
    why = "STSC_DATA_ROOT is not set";
    return std::nullopt;
  }
  const fs::path raw = settings.data_root / dataset;
  const bool present = dataset == "shd" ? fs::exists(raw / "shd_train.h5") &&
                                              fs::exists(raw / "shd_test.h5")
                                        : fs::is_directory(raw / "Train") &&
                                              fs::is_directory(raw / "Test");
  if (!present) {
    why = fmt::format("{} dataset not found under {}", dataset, raw.string());
    return std::nullopt;
  }
  return raw;
}

train::TrainData Prepare(const Settings& settings, const train::TrainConfig& config,
                         const fs::path& raw) {
  const fs::path cache =
      settings.data_root / "cache" / fmt::format("{}-T{}", config.dataset, config.T);
  events::PrepareOptions options;
  options.steps = config.T;
  if (config.fixed_duration_us > 0) options.load.fixed_duration_us = config.fixed_duration_us;
  const events::PrepareReport report =
      events::PrepareData(events::ParseDatasetKind(config.dataset), raw, cache, options);
  Log(fmt::format("{} cache {}: {} train / {} test", config.dataset,
                  report.up_to_date ? "up to date" : "written", report.train.samples,
                  report.test.samples));
  return train::LoadTrainData(config, cache);
}

double RunBest(const Settings& settings, const train::TrainConfig& config,
               const train::TrainData& data, const std::string& name) {
  Log(fmt::format("run {}: policy={} variant={} trf={} fli={} epochs={}", name, config.policy,
                  config.variant, config.enable_trf, config.enable_fli, config.epochs));
  const train::TrainResult result =
      train::Train(config, data, settings.out_dir / name, [](const std::string& line) {
        if (line.rfind("epoch", 0) == 0) Log(line);
      });
  return result.best_test_acc;
}

train::TrainConfig ShdConfig(const Settings& settings, std::size_t epochs) {
  train::TrainConfig config = train::DefaultsFor("shd");
  config.epochs = epochs;
  config.shards = settings.shards;
  return config;
}

Outcome ShdReproduction(const Settings& settings) {
  std::string why;
  const auto raw = RawDir(settings, "shd", why);
  if (!raw) return {Status::kSkip, why};
  const std::size_t epochs = settings.short_mode ? 50 : 200;
  train::TrainConfig vanilla = ShdConfig(settings, epochs);
  const train::TrainData data = Prepare(settings, vanilla, *raw);
  vanilla.policy = "none";
  train::TrainConfig stsc = ShdConfig(settings, epochs);
  stsc.policy = "P1";
  const double v = RunBest(settings, vanilla, data, "shd-vanilla");
  const double s = RunBest(settings, stsc, data, "shd-stsc-P1");
  const double v_min = settings.short_mode ? 0.60 : 0.70;
  const double gain = settings.short_mode ? 0.04 : 0.05;
  const double s_min = settings.short_mode ? 0.0 : 0.85;
  const bool ok = v >= v_min && s >= v + gain && s >= s_min;
  return Verdict(ok, fmt::format("{} epochs: vanilla {:.2f}% (>= {:.0f}%), STSC P1 {:.2f}% "
                                 "(>= vanilla + {:.0f} pts{})",
                                 epochs, 100 * v, 100 * v_min, 100 * s, 100 * gain,
                                 settings.short_mode ? "" : ", >= 85%"));
}

Outcome AblationDirections(const Settings& settings) {
  std::string why;
  const auto raw = RawDir(settings, "shd", why);
  if (!raw) return {Status::kSkip, why};
  const train::TrainData data = Prepare(settings, ShdConfig(settings, 50), *raw);
  auto run = [&](const std::string& policy, bool trf, bool fli, const std::string& variant) {
    train::TrainConfig c = ShdConfig(settings, 50);
    c.policy = policy;
    c.enable_trf = trf;
    c.enable_fli = fli;
    c.variant = variant;
    return RunBest(settings, c, data,
                   fmt::format("ablate-{}-{}{}-{}", policy, trf ? "trf" : "", fli ? "fli" : "",
                               variant));
  };
  const double trf_p1 = run("P1", true, false, "snn");
  const double fli_p1 = run("P1", false, true, "snn");
  const double trf_p3 = run("P3", true, false, "snn");
  const double fli_p3 = run("P3", false, true, "snn");
  const double both = run("P1", true, true, "snn");
  const double snn = run("none", true, true, "snn");
  const double relu = run("none", true, true, "fcs-relu");
  std::vector<std::string> broken;
  if (!(fli_p1 > trf_p1)) broken.push_back("FLI-only > TRF-only");
  if (!(trf_p1 > trf_p3)) broken.push_back("TRF P1 > P3");
  if (!(fli_p1 > fli_p3)) broken.push_back("FLI P1 > P3");
  if (!(both > snn)) broken.push_back("SNN+STSC > SNN");
  if (!(snn > relu)) broken.push_back("SNN > FCs(ReLU)");
  return Verdict(broken.empty(),
                 fmt::format("fli {:.1f} vs trf {:.1f}; P1/P3 trf {:.1f}/{:.1f}, fli {:.1f}/{:.1f}; "
                             "SNN+STSC {:.1f} > SNN {:.1f} > FCs(ReLU) {:.1f}{}",
                             100 * fli_p1, 100 * trf_p1, 100 * trf_p1, 100 * trf_p3,
                             100 * fli_p1, 100 * fli_p3, 100 * both, 100 * snn, 100 * relu,
                             broken.empty() ? ""
                                            : fmt::format(" (violated: {})",
                                                          fmt::join(broken, ", "))));
}

Outcome NmnistSmoke(const Settings& settings) {
  std::string why;
  const auto raw = RawDir(settings, "nmnist", why);
  if (!raw) return {Status::kSkip, why};
  train::TrainConfig config = train::DefaultsFor("nmnist");
  config.epochs = 20;
  config.train_limit = 5000;
  config.test_limit = 1000;
  config.shards = settings.shards;
  const train::TrainData data = Prepare(settings, config, *raw);
  const double best = RunBest(settings, config, data, "nmnist-smoke");
  return Verdict(best >= 0.90, fmt::format("{} train / {} test, 20 epochs: best {:.2f}% (>= 90%)",
                                           data.train.size(), data.test.size(), 100 * best));
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome(const Settings&)> run;
  const char* dataset;  // raw dataset the criterion trains on, or nullptr
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> kCriteria = {
      {1, "gradient correctness", GradientCorrectness, nullptr},
      {2, "oracle equivalence", OracleEquivalence, nullptr},
      {3, "hand-computed values", HandValues, nullptr},
      {4, "structural invariants", StructuralInvariants, nullptr},
      {5, "SHD reproduction", ShdReproduction, "shd"},
      {6, "ablation directions", AblationDirections, "shd"},
      {7, "N-MNIST smoke test", NmnistSmoke, "nmnist"},
      {8, "determinism", Determinism, nullptr},
  };
  return kCriteria;
}

const char* StatusName(Status s) {
  switch (s) {
    case Status::kPass: return "PASS";
    case Status::kFail: return "FAIL";
    case Status::kSkip: return "SKIP";
  }
  return "?";
}

}  // namespace
}  // namespace stsc::acceptance

int main(int argc, char** argv) {
  using namespace stsc::acceptance;
  CLI::App app{"Acceptance criteria for the STSC-SNN stack"};
  std::vector<int> selected;
  Settings settings;
  std::string data_root;
  if (const char* env = std::getenv("STSC_DATA_ROOT")) data_root = env;
  bool with_data = false;
  settings.shards = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--criterion", selected, "Run only these criteria (1-8)")
      ->check(CLI::Range(1, 8));
  app.add_option("--data-root", data_root, "Dataset root (default: $STSC_DATA_ROOT)");
  app.add_option("--out", settings.out_dir, "Directory for training runs");
  app.add_flag("--short", settings.short_mode, "50-epoch mode for the SHD reproduction");
  app.add_flag("--with-data", with_data,
               "Also run the dataset criteria (5-7) when no --criterion is given");
  app.add_option("--shards", settings.shards, "Batch shards (threads) for dataset runs");
  CLI11_PARSE(app, argc, argv);
  settings.data_root = data_root;

  bool failed = false;
  bool skipped = false;
  for (const Criterion& c : Criteria()) {
    const bool explicit_pick =
        std::find(selected.begin(), selected.end(), c.id) != selected.end();
    if (!selected.empty() && !explicit_pick) continue;
    Outcome outcome;
    std::string why;
    if (selected.empty() && c.dataset != nullptr && !with_data) {
      outcome = {Status::kSkip, RawDir(settings, c.dataset, why)
                                    ? "long dataset run; select with --criterion or --with-data"
                                    : why};
    } else {
      try {
        outcome = c.run(settings);
      } catch (const std::exception& e) {
        outcome = {Status::kFail, fmt::format("error: {}", e.what())};
      }
    }
    fmt::print("criterion {} [{}]: {}  {}\n", c.id, c.title, StatusName(outcome.status),
               outcome.detail);
    std::fflush(stdout);
    failed = failed || outcome.status == Status::kFail;
    skipped = skipped || outcome.status == Status::kSkip;
  }
  if (failed) return 1;
  if (!selected.empty() && skipped) return 77;
  return 0;
}
