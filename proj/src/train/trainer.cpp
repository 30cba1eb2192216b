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
#include "train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <random>
#include <thread>

#include "common/error.hpp"
#include "diff/checkpoint.hpp"
#include "train/adam.hpp"
#include "train/loss.hpp"

namespace stsc::train {

namespace {

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  STSC_CHECK(out.good(), ErrorCode::kIo, "cannot write {}", path.string());
  out << text;
  STSC_CHECK(out.good(), ErrorCode::kIo, "failed writing {}", path.string());
}

std::vector<diff::NamedTensor> RoundedState(const net::Network& network) {
  std::vector<diff::NamedTensor> state = network.StateDict();
  for (diff::NamedTensor& entry : state)
    entry.value = diff::RoundToCheckpointPrecision(entry.value);
  return state;
}

std::vector<int> GatherLabels(const events::FrameDataset& data,
                              std::span<const std::size_t> indices) {
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) labels.push_back(data.labels[i]);
  return labels;
}

struct ShardOutput {
  double loss = 0.0;
  std::size_t correct = 0;
};

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(c)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

events::FrameDataset Subsample(const events::FrameDataset& data, std::size_t limit) {
  if (limit == 0 || limit >= data.size()) return data;
  events::FrameDataset out;
  out.sample_shape = data.sample_shape;
  const std::size_t stride = data.SampleSize();
  out.frames.reserve(limit * stride);
  for (std::size_t k = 0; k < limit; ++k) {
    const std::size_t i = k * data.size() / limit;
    out.labels.push_back(data.labels[i]);
    out.frames.insert(out.frames.end(), data.frames.begin() + i * stride,
                      data.frames.begin() + (i + 1) * stride);
  }
  return out;
}

TrainData LoadTrainData(const TrainConfig& config, const std::filesystem::path& data_dir) {
  STSC_CHECK(std::filesystem::is_directory(data_dir), ErrorCode::kIo,
             "frame cache directory {} does not exist (run prepare-data first)",
             data_dir.string());
  TrainData data{Subsample(events::LoadFrameDataset(data_dir, events::Split::kTrain),
                           config.train_limit),
                 Subsample(events::LoadFrameDataset(data_dir, events::Split::kTest),
                           config.test_limit)};
  for (const events::FrameDataset* d : {&data.train, &data.test}) {
    STSC_CHECK(d->steps() == config.T, ErrorCode::kInvalidArgument,
               "frame cache in {} has T={} but the config asks for T={}; rerun prepare-data",
               data_dir.string(), d->steps(), config.T);
    STSC_CHECK(d->SpatialShape() == SampleShapeFor(config.dataset),
               ErrorCode::kInvalidArgument, "frame cache in {} holds {} samples, not {}",
               data_dir.string(), diff::ShapeString(d->SpatialShape()), config.dataset);
  }
  return data;
}

net::Network BuildNetwork(const TrainConfig& config, const diff::Shape& sample_shape) {
  config.Validate();
  return net::Network(BuildSpec(config), sample_shape, BuildOptions(config), config.seed);
}

EvalResult Evaluate(net::Network& network, const events::FrameDataset& data,
                    std::size_t batch_size) {
  STSC_CHECK(batch_size > 0, ErrorCode::kInvalidArgument, "batch size must be positive");
  EvalResult result;
  if (data.size() == 0) return result;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  std::vector<std::size_t> indices;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    indices.resize(end - start);
    std::iota(indices.begin(), indices.end(), start);
    const std::vector<int> labels = GatherLabels(data, indices);
    diff::Tape tape(diff::ParamGradMode::kDeferred);
    net::ForwardContext context(0);
    const diff::Var o = network.Forward(tape, data.Batch(indices), net::Mode::kEval, context);
    const LossOutput out = VotingMseLoss(tape, o, labels, network.classes());
    loss_sum += tape.Value(out.loss)[0] * static_cast<double>(labels.size());
    for (std::size_t b = 0; b < labels.size(); ++b)
      correct += out.predictions[b] == labels[b] ? 1 : 0;
    result.predictions.insert(result.predictions.end(), out.predictions.begin(),
                              out.predictions.end());
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  result.loss = loss_sum / static_cast<double>(data.size());
  return result;
}

EvalResult EvaluateSnapshot(net::Network& network, const events::FrameDataset& data,
                            std::size_t batch_size) {
  const std::vector<diff::NamedTensor> master = network.StateDict();
  network.LoadStateDict(RoundedState(network));
  EvalResult result;
  try {
    result = Evaluate(network, data, batch_size);
  } catch (...) {
    network.LoadStateDict(master);
    throw;
  }
  network.LoadStateDict(master);
  return result;
}

std::string MetricsCsv(const std::vector<EpochMetrics>& history) {
  std::string out = "epoch,train_loss,train_acc,test_acc,seconds\n";
  for (const EpochMetrics& m : history)
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.3f}\n", m.epoch, m.train_loss,
                       m.train_acc, m.test_acc, m.seconds);
  return out;
}

TrainResult Train(const TrainConfig& config, const TrainData& data,
                  const std::filesystem::path& out_dir, const LogFn& log) {
  config.Validate();
  STSC_CHECK(data.train.size() > 0, ErrorCode::kInvalidArgument, "training split is empty");
  net::Network network = BuildNetwork(config, data.train.SpatialShape());
  const bool write = !out_dir.empty();
  if (write) {
    std::filesystem::create_directories(out_dir);
    WriteText(out_dir / "config.txt", config.Render());
  }
  if (log) log(network.Describe());

  const std::vector<diff::Parameter*> params = network.Parameters();
  AdamState adam;
  std::mt19937_64 shuffle_rng(DeriveSeed(config.seed, 1));
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start_time = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::size_t batch = end - start;
      const std::size_t shards = std::min(config.shards, batch);

      struct Shard {
        std::span<const std::size_t> indices;
        std::unique_ptr<diff::Tape> tape;
        std::unique_ptr<net::ForwardContext> context;
        ShardOutput out;
      };
      std::vector<Shard> work(shards);
      for (std::size_t s = 0; s < shards; ++s) {
        const std::size_t lo = start + s * batch / shards;
        const std::size_t hi = start + (s + 1) * batch / shards;
        work[s].indices = std::span<const std::size_t>(order.data() + lo, hi - lo);
        work[s].tape = std::make_unique<diff::Tape>(diff::ParamGradMode::kDeferred);
        work[s].context =
            std::make_unique<net::ForwardContext>(DeriveSeed(config.seed, 2, step, s));
      }
      auto run = [&](Shard& shard) {
        const std::vector<int> labels = GatherLabels(data.train, shard.indices);
        const diff::Var o = network.Forward(*shard.tape, data.train.Batch(shard.indices),
                                            net::Mode::kTrain, *shard.context);
        const LossOutput out =
            VotingMseLoss(*shard.tape, o, labels, network.classes(), batch);
        shard.tape->Backward(out.loss);
        shard.out.loss = shard.tape->Value(out.loss)[0];
        for (std::size_t b = 0; b < labels.size(); ++b)
          shard.out.correct += out.predictions[b] == labels[b] ? 1 : 0;
      };
      if (shards == 1) {
        run(work[0]);
      } else {
        std::vector<std::exception_ptr> errors(shards);
        std::vector<std::thread> threads;
        for (std::size_t s = 0; s < shards; ++s)
          threads.emplace_back([&, s] {
            try {
              run(work[s]);
            } catch (...) {
              errors[s] = std::current_exception();
            }
          });
        for (std::thread& t : threads) t.join();
        for (const std::exception_ptr& e : errors)
          if (e) std::rethrow_exception(e);
      }

      for (diff::Parameter* p : params) p->ZeroGrad();
      double batch_loss = 0.0;
      for (Shard& shard : work) {
        shard.tape->AccumulateParameterGrads();
        network.ApplyBatchNormUpdates(*shard.context);
        batch_loss += shard.out.loss;
        correct += shard.out.correct;
      }
      STSC_CHECK(std::isfinite(batch_loss), ErrorCode::kNumeric,
                 "loss became non-finite at epoch {}", epoch);
      AdamStep(params, adam, config.learning_rate);
      loss_sum += batch_loss * static_cast<double>(batch);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(order.size());
    m.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
    m.test_acc = EvaluateSnapshot(network, data.test, config.batch_size).accuracy;
    if (config.log_wall_time)
      m.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    result.history.push_back(m);
    result.final_test_acc = m.test_acc;
    const bool improved = result.best_epoch == 0 || m.test_acc > result.best_test_acc;
    if (improved) {
      result.best_epoch = epoch;
      result.best_test_acc = m.test_acc;
    }
    if (write) {
      if (improved) diff::SaveCheckpoint(out_dir / "best.ckpt", RoundedState(network));
      WriteText(out_dir / "metrics.csv", MetricsCsv(result.history));
    }
    if (log)
      log(fmt::format("epoch {:>4}  loss {:.6f}  train_acc {:.4f}  test_acc {:.4f}  {:.1f}s",
                      epoch, m.train_loss, m.train_acc, m.test_acc, m.seconds));
  }

  if (write) {
    diff::SaveCheckpoint(out_dir / "final.ckpt", RoundedState(network));
    nlohmann::ordered_json summary;
    summary["seed"] = config.seed;
    summary["epochs"] = config.epochs;
    summary["best_epoch"] = result.best_epoch;
    summary["best_test_acc"] = result.best_test_acc;
    summary["final_test_acc"] = result.final_test_acc;
    summary["parameters"] = network.ParameterCount();
    WriteText(out_dir / "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

}  // namespace stsc::train
