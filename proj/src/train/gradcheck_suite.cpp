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
#include "train/gradcheck_suite.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "common/error.hpp"
#include "diff/gradcheck.hpp"
#include "diff/ops.hpp"
#include "neuron/lif.hpp"
#include "synapse/stsc.hpp"
#include "train/loss.hpp"

namespace stsc::train {

namespace {

using diff::Shape;
using diff::Tape;
using diff::Tensor;
using diff::Var;

struct Case {
  diff::CheckedFn fn;
  std::vector<Tensor> inputs;
};

using CaseFactory = std::function<Case(std::mt19937_64& rng)>;

Tensor Uniform(std::mt19937_64& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

// Values bounded away from zero.
Tensor AwayFromZero(std::mt19937_64& rng, Shape shape) {
  Tensor t = Uniform(rng, std::move(shape), 0.05, 1.0);
  std::bernoulli_distribution sign(0.5);
  for (double& v : t.values())
    if (sign(rng)) v = -v;
  return t;
}

// Scale whose backward adds 0.1 to the first partial.
Var FaultyScale(Tape& tape, Var x, double factor) {
  Tensor value = tape.Value(x);
  value *= factor;
  return tape.Record(
      std::move(value), {x},
      [factor](const Tensor& g, std::span<Tensor* const> grads) {
        if (grads[0] == nullptr) return;
        for (std::size_t i = 0; i < g.size(); ++i) (*grads[0])[i] += g[i] * factor;
        (*grads[0])[0] += 0.1;
      },
      "faulty_scale");
}

std::vector<std::pair<std::string, CaseFactory>> Cases(bool inject_fault) {
  using diff::PoolKind;
  using diff::TemporalPadding;
  std::vector<std::pair<std::string, CaseFactory>> cases;
  auto add = [&](std::string name, CaseFactory factory) {
    cases.emplace_back(std::move(name), std::move(factory));
  };

  add("matmul", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::MatMul(t, in[0], in[1]); },
                {Uniform(rng, {3, 4}), Uniform(rng, {4, 2})}};
  });
  add("linear", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Linear(t, in[0], in[1], in[2]); },
                {Uniform(rng, {2, 3, 4}), Uniform(rng, {4, 5}), Uniform(rng, {5})}};
  });
  add("add", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Add(t, in[0], in[1]); },
                {Uniform(rng, {3, 4}), Uniform(rng, {3, 4})}};
  });
  add("mul", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Mul(t, in[0], in[1]); },
                {Uniform(rng, {3, 4}), Uniform(rng, {3, 4})}};
  });
  add("scale", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Scale(t, in[0], -1.7); },
                {Uniform(rng, {5})}};
  });
  add("sigmoid", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Sigmoid(t, in[0]); },
                {Uniform(rng, {4, 3}, -4.0, 4.0)}};
  });
  add("relu", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Relu(t, in[0]); },
                {AwayFromZero(rng, {4, 3})}};
  });
  add("reshape", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  return diff::Mul(t, diff::Reshape(t, in[0], {3, 4}), in[1]);
                },
                {Uniform(rng, {2, 6}), Uniform(rng, {3, 4})}};
  });
  add("sum", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  const Var s = diff::Sum(t, in[0]);
                  return diff::Mul(t, s, s);
                },
                {Uniform(rng, {3, 2})}};
  });
  add("weighted_sum", [](auto& rng) {
    Tensor w = Uniform(rng, {2, 3});
    return Case{[w](Tape& t, auto in) { return diff::WeightedSum(t, in[0], w); },
                {Uniform(rng, {2, 3})}};
  });
  add("tconv1d", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::DepthwiseTConv1d(t, in[0], in[1]); },
                {Uniform(rng, {6, 2, 3}), Uniform(rng, {5, 3})}};
  });
  add("tconv1d_causal", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  return diff::DepthwiseTConv1d(t, in[0], in[1], TemporalPadding::kCausal);
                },
                {Uniform(rng, {6, 2, 3}), Uniform(rng, {3, 3})}};
  });
  add("tconv3d", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::DepthwiseTConv3d(t, in[0], in[1]); },
                {Uniform(rng, {5, 2, 2, 3, 3}), Uniform(rng, {3, 2})}};
  });
  add("tconv1d_mix", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::TConv1dMix(t, in[0], in[1]); },
                {Uniform(rng, {6, 2, 4}), Uniform(rng, {3, 4, 2})}};
  });
  add("conv2d", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Conv2d(t, in[0], in[1], in[2]); },
                {Uniform(rng, {2, 2, 4, 5}), Uniform(rng, {3, 2, 3, 3}), Uniform(rng, {3})}};
  });
  add("maxpool2d", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Pool2d(t, in[0], PoolKind::kMax); },
                {Uniform(rng, {2, 2, 5, 4})}};
  });
  add("avgpool2d", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::Pool2d(t, in[0], PoolKind::kAvg); },
                {Uniform(rng, {2, 2, 5, 4})}};
  });
  add("spatial_avg", [](auto& rng) {
    return Case{[](Tape& t, auto in) { return diff::SpatialAvg(t, in[0]); },
                {Uniform(rng, {2, 3, 3, 4})}};
  });
  add("broadcast_spatial", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  return diff::Mul(t, diff::BroadcastSpatial(t, in[0], 2, 3), in[1]);
                },
                {Uniform(rng, {2, 3}), Uniform(rng, {2, 3, 2, 3})}};
  });
  add("dropout", [](auto& rng) {
    const std::uint64_t mask_seed = rng();
    return Case{[mask_seed](Tape& t, auto in) {
                  std::mt19937_64 mask_rng(mask_seed);
                  return diff::Dropout(t, in[0], 0.3, true, mask_rng);
                },
                {Uniform(rng, {4, 5})}};
  });
  add("batchnorm_train", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  const Tensor zeros({3}), ones({3}, 1.0);
                  return diff::BatchNorm(t, in[0], in[1], in[2], 1, true, zeros, ones, 1e-5,
                                         nullptr);
                },
                {Uniform(rng, {4, 3, 2, 2}), Uniform(rng, {3}, 0.5, 1.5), Uniform(rng, {3})}};
  });
  add("batchnorm_eval", [](auto& rng) {
    Tensor mean = Uniform(rng, {3});
    Tensor var = Uniform(rng, {3}, 0.5, 2.0);
    return Case{[mean, var](Tape& t, auto in) {
                  return diff::BatchNorm(t, in[0], in[1], in[2], 1, false, mean, var, 1e-5,
                                         nullptr);
                },
                {Uniform(rng, {4, 3, 2, 2}), Uniform(rng, {3}, 0.5, 1.5), Uniform(rng, {3})}};
  });
  add("lif_relaxed", [](auto& rng) {
    neuron::LifConfig config;
    config.tau = 2.0;
    config.v_th = 1.0;
    config.relaxed = true;
    return Case{[config](Tape& t, auto in) { return neuron::Lif(t, in[0], config); },
                {Uniform(rng, {6, 8}, -0.5, 2.0)}};
  });
  add("stsc_1d", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  using synapse::Variant;
                  const Var c = synapse::TrfForward(t, in[0], in[1], Variant::kDense1d);
                  const Var d = synapse::FliForward(t, in[0], in[2], in[3], Variant::kDense1d);
                  return diff::Mul(t, c, d);
                },
                {Uniform(rng, {5, 2, 4}), Uniform(rng, {5, 4}), Uniform(rng, {3, 4, 2}),
                 Uniform(rng, {2, 4})}};
  });
  add("stsc_3d", [](auto& rng) {
    return Case{[](Tape& t, auto in) {
                  using synapse::Variant;
                  const Var c = synapse::TrfForward(t, in[0], in[1], Variant::kConv3d);
                  const Var d = synapse::FliForward(t, in[0], in[2], in[3], Variant::kConv3d);
                  return diff::Mul(t, c, d);
                },
                {Uniform(rng, {4, 2, 3, 3, 3}), Uniform(rng, {3, 3}),
                 Uniform(rng, {3, 3, 2}), Uniform(rng, {2, 3})}};
  });
  add("voting_mse", [](auto& rng) {
    std::uniform_int_distribution<int> label(0, 2);
    std::vector<int> labels = {label(rng), label(rng), label(rng)};
    return Case{[labels](Tape& t, auto in) {
                  return VotingMseLoss(t, in[0], labels, 3).loss;
                },
                {Uniform(rng, {4, 3, 6}, 0.0, 1.0)}};
  });
  if (inject_fault) {
    add("injected_fault", [](auto& rng) {
      return Case{[](Tape& t, auto in) { return FaultyScale(t, in[0], 2.0); },
                  {Uniform(rng, {4})}};
    });
  }
  return cases;
}

}  // namespace

bool GradCheckReport::passed() const {
  return !lines.empty() &&
         std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.passed; });
}

std::string GradCheckReport::Render() const {
  std::string out;
  for (const GradCheckLine& l : lines)
    out += fmt::format("{:<20} seeds={:<3} max_rel_err={:.3e}  {}\n", l.name, l.seeds,
                       l.max_relative_error, l.passed ? "PASS" : "FAIL");
  out += fmt::format("gradcheck: {}\n", passed() ? "all checks passed" : "FAILED");
  return out;
}

std::vector<std::string> GradCheckNames() {
  std::vector<std::string> names;
  for (const auto& [name, factory] : Cases(false)) names.push_back(name);
  return names;
}

GradCheckReport RunGradCheckSuite(const GradCheckSuiteOptions& options) {
  STSC_CHECK(options.seeds > 0, ErrorCode::kInvalidArgument, "seed count must be positive");
#ifdef STSC_GRADCHECK_FAULT
  const bool inject = true;
#else
  const bool inject = options.inject_fault;
#endif
  GradCheckReport report;
  for (const auto& [name, factory] : Cases(inject)) {
    if (!options.filter.empty() && name.find(options.filter) == std::string::npos) continue;
    GradCheckLine line{name, options.seeds, 0.0, true};
    for (std::size_t seed = 0; seed < options.seeds; ++seed) {
      std::mt19937_64 rng(0x5eed0000ULL + seed);
      const Case c = factory(rng);
      const diff::GradCheckResult r = diff::GradCheck(c.fn, c.inputs);
      line.max_relative_error = std::max(line.max_relative_error, r.max_relative_error);
    }
    line.passed = line.max_relative_error < options.tolerance;
    report.lines.push_back(line);
  }
  return report;
}

}  // namespace stsc::train
