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
#include <gtest/gtest.h>

#include <numeric>

#include "net/network.hpp"
#include "support/helpers.hpp"
#include "train/loss.hpp"

namespace stsc::net {
namespace {

using diff::Shape;
using diff::Tape;
using diff::Tensor;
using testing::RandomTensor;

constexpr const char* kShd = "Input-128FC-128FC-100FC-Voting-20";

NetworkOptions ShdOptions() {
  NetworkOptions options;
  options.lif.tau = 10.0;
  options.lif.v_th = 0.3;
  return options;
}

Network MakeShd(const std::string& policy, std::uint64_t seed = 7) {
  NetworkSpec spec = ParseSpec(kShd);
  spec.stsc_points = ParsePolicy(policy, spec.SpatialOpCount());
  return Network(spec, {700}, ShdOptions(), seed);
}

Tensor RunForward(Network& net, const Tensor& input, Mode mode = Mode::kEval) {
  Tape tape;
  ForwardContext ctx(1);
  return tape.Value(net.Forward(tape, input, mode, ctx));
}

TEST(Network, ShdOutputShapeAndCounts) {
  Network net = MakeShd("none");
  EXPECT_EQ(net.output_width(), 100u);
  EXPECT_EQ(net.classes(), 20u);
  EXPECT_EQ(net.ParameterCount(), 700u * 128 + 128 + 128 * 128 + 128 + 128 * 100 + 100);
  EXPECT_EQ(net.stsc_block_count(), 0u);
  EXPECT_EQ(RunForward(net, Tensor({6, 3, 700})).shape(), (Shape{6, 3, 100}));
}

TEST(Network, StscBlocksFollowPolicy) {
  const std::size_t vanilla = MakeShd("none").ParameterCount();
  Network p1 = MakeShd("P1");
  EXPECT_EQ(p1.stsc_block_count(), 1u);
  EXPECT_EQ(p1.ParameterCount(), vanilla + 5 * 700 + 3 * 700 * 700 + 700 * 700);
  EXPECT_EQ(MakeShd("P123").stsc_block_count(), 3u);
  EXPECT_EQ(MakeShd("P23").stsc_block_count(), 2u);
  EXPECT_NE(p1.Describe().find("STSC-1D before layer 1"), std::string::npos);
  EXPECT_NE(p1.Describe().find("voting: 100 -> 20 (groups of 5)"), std::string::npos);
}

TEST(Network, ZeroInputGivesZeroSpikesWithoutBias) {
  NetworkOptions options = ShdOptions();
  options.bias = false;
  for (const char* policy : {"none", "P123"}) {
    NetworkSpec spec = ParseSpec(kShd);
    spec.stsc_points = ParsePolicy(policy, spec.SpatialOpCount());
    Network net(spec, {700}, options, 3);
    const Tensor out = RunForward(net, Tensor({5, 2, 700}));
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Network, OutputsAreBinarySpikes) {
  std::mt19937_64 rng(1);
  Network net = MakeShd("P12");
  const Tensor out = RunForward(net, RandomTensor(rng, {8, 2, 700}, 0.0, 3.0));
  for (double v : out.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
  EXPECT_GT(std::accumulate(out.values().begin(), out.values().end(), 0.0), 0.0);
}

TEST(Network, TimestepsShareWeights) {
  std::mt19937_64 rng(2);
  Network net = MakeShd("none");
  const Tensor frame = RandomTensor(rng, {1, 1, 700}, 0.0, 2.0);
  Tensor twice({2, 2, 700});
  for (std::size_t i = 0; i < 700; ++i) twice.at({0, 1, i}) = frame[i];
  const Tensor single = RunForward(net, frame);
  const Tensor both = RunForward(net, twice);
  for (std::size_t j = 0; j < 100; ++j) EXPECT_EQ(both.at({0, 1, j}), single[j]);
}

TEST(Network, BatchRowsAreIndependent) {
  std::mt19937_64 rng(3);
  Network net = MakeShd("P1");
  const Tensor x = RandomTensor(rng, {6, 3, 700}, 0.0, 2.0);
  const Tensor all = RunForward(net, x);
  Tensor row({6, 1, 700});
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < 700; ++i) row.at({t, 0, i}) = x.at({t, 2, i});
  const Tensor one = RunForward(net, row);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t j = 0; j < 100; ++j) EXPECT_EQ(all.at({t, 2, j}), one.at({t, 0, j}));
}

TEST(Network, VotingRowsSumToOne) {
  const Tensor m = VotingMatrix(20, 100);
  for (std::size_t i = 0; i < 20; ++i) {
    double sum = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < 100; ++j) {
      sum += m.at({i, j});
      nonzero += m.at({i, j}) != 0.0;
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
    EXPECT_EQ(nonzero, 5u);
  }
  EXPECT_STSC_ERROR(ErrorCode::kSpec, VotingMatrix(7, 100));
}

TEST(Network, VotingWidthMustDivide) {
  EXPECT_STSC_ERROR(ErrorCode::kSpec, Network(ParseSpec("Input-Voting-7"), {100}, {}, 1));
  EXPECT_NO_THROW(Network(ParseSpec("Input-Voting-5"), {100}, {}, 1));
}

TEST(Network, GradientReachesEveryParameter) {
  std::mt19937_64 rng(4);
  Network net = MakeShd("P123");
  Tape tape;
  ForwardContext ctx(1);
  const diff::Var out =
      net.Forward(tape, RandomTensor(rng, {6, 4, 700}, 0.0, 2.0), Mode::kTrain, ctx);
  const std::vector<int> labels = {0, 5, 11, 19};
  const train::LossOutput loss = train::VotingMseLoss(tape, out, labels, 20);
  tape.Backward(loss.loss);
  for (diff::Parameter* p : net.Parameters()) {
    double norm = 0.0;
    for (double g : p->grad.values()) norm += g * g;
    EXPECT_GT(norm, 0.0) << p->name;
  }
}

TEST(Network, StateDictRoundTrip) {
  std::mt19937_64 rng(5);
  Network a = MakeShd("P1", 1);
  Network b = MakeShd("P1", 2);
  const Tensor x = RandomTensor(rng, {5, 2, 700}, 0.0, 2.0);
  EXPECT_NE(RunForward(a, x), RunForward(b, x));
  b.LoadStateDict(a.StateDict());
  EXPECT_EQ(RunForward(a, x), RunForward(b, x));
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, MakeShd("none").LoadStateDict(a.StateDict()));
  std::vector<diff::NamedTensor> partial = a.StateDict();
  partial.pop_back();
  EXPECT_STSC_ERROR(ErrorCode::kCorruptInput, b.LoadStateDict(partial));
}

TEST(Network, SameSeedSameWeights) {
  const auto a = MakeShd("P1", 9).StateDict();
  const auto b = MakeShd("P1", 9).StateDict();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

TEST(Network, ConvNetworkWithBatchNorm) {
  NetworkSpec spec = ParseSpec("Input-4C3-AP2-4C3-AP2-0.5DP-32FC-0.5DP-10FC-Voting-10");
  spec.stsc_points = ParsePolicy("P12", spec.SpatialOpCount());
  Network net(spec, {2, 9, 9}, {}, 3);
  EXPECT_EQ(net.stsc_block_count(), 2u);
  std::mt19937_64 rng(6);
  const Tensor x = RandomTensor(rng, {3, 2, 2, 9, 9}, 0.0, 2.0);
  Tape tape;
  ForwardContext ctx(2);
  EXPECT_EQ(tape.Value(net.Forward(tape, x, Mode::kTrain, ctx)).shape(), (Shape{3, 2, 10}));
  EXPECT_EQ(ctx.bn_updates.size(), 2u);
  const auto before = net.StateDict();
  net.ApplyBatchNormUpdates(ctx);
  const auto after = net.StateDict();
  bool changed = false;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (before[i].name.find("running") != std::string::npos)
      changed = changed || !(before[i].value == after[i].value);
  EXPECT_TRUE(changed);
  const Tensor e1 = RunForward(net, x);
  const Tensor e2 = RunForward(net, x);
  EXPECT_EQ(e1, e2);
}

TEST(Network, RejectsWrongInputShape) {
  Network net = MakeShd("none");
  EXPECT_STSC_ERROR(ErrorCode::kInvalidArgument, RunForward(net, Tensor({3, 2, 699})));
  EXPECT_STSC_ERROR(ErrorCode::kInvalidArgument, RunForward(net, Tensor({3, 700})));
}

}  // namespace
}  // namespace stsc::net
