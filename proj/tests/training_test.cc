//
// Copyright 2026 The privcnp Authors
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
//

#include "privcnp/training.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "privcnp/errors.h"
#include "privcnp/model.h"
#include "privcnp/nn/params.h"
#include "privcnp/random.h"
#include "privcnp/taskgen.h"

namespace privcnp::training {
namespace {

taskgen::GeneratorConfig SmallEq() {
  taskgen::GeneratorConfig gen = taskgen::GeneratorConfig::Eq(1.0);
  gen.context_size = {5, 30};
  gen.target_count = 24;
  return gen;
}

TrainConfig Short(int steps) {
  TrainConfig c;
  c.steps = steps;
  c.batch_size = 2;
  c.seed = 3;
  return c;
}

bool SameParams(const nn::ParamStore& a, const nn::ParamStore& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.value(i).values != b.value(i).values) return false;
  }
  return true;
}

TEST(TrainConfig, CadenceAndValidation) {
  TrainConfig c;
  EXPECT_EQ(c.Cadence(), 100);
  c.steps = 150;
  EXPECT_EQ(c.Cadence(), 1);
  c.log_every = 25;
  EXPECT_EQ(c.Cadence(), 25);
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), DomainError);
  TrainConfig d;
  d.flags.enable_clip = false;
  d.learning_rate = 1e-3;
  EXPECT_EQ(TrainConfig::FromJson(d.ToJson()).ToJson(), d.ToJson());
}

TEST(OptionsFor, TrainingModeOnlyForAblations) {
  EXPECT_EQ(OptionsFor({}).mode, dpsetconv::EncodeMode::kDeploy);
  dpsetconv::MechanismFlags f;
  f.enable_density_noise = false;
  EXPECT_EQ(OptionsFor(f).mode, dpsetconv::EncodeMode::kTraining);
}

TEST(MetaTrain, ZeroStepsLeavesStateUnchanged) {
  model::DpConvCnp m(model::ModelConfig::Tiny(), 1);
  const nn::ParamStore before = m.params();
  const auto val = MakeTaskSet(SmallEq(), 2, 5);
  const TrainResult r = MetaTrain(m, SmallEq(), val, Short(0));
  EXPECT_TRUE(r.log.empty());
  EXPECT_TRUE(SameParams(m.params(), before));
}

TEST(MetaTrain, LogRowsAndDeterminism) {
  const auto val = MakeTaskSet(SmallEq(), 3, 5);
  TrainConfig cfg = Short(6);
  cfg.log_every = 2;
  model::DpConvCnp a(model::ModelConfig::Tiny(), 1);
  int callbacks = 0;
  const TrainResult ra =
      MetaTrain(a, SmallEq(), val, cfg, [&](const TrainLogRow&) { ++callbacks; });
  ASSERT_EQ(ra.log.size(), 3u);
  EXPECT_EQ(callbacks, 3);
  EXPECT_EQ(ra.log[0].step, 2);
  EXPECT_EQ(ra.log[2].step, 6);
  double best = ra.log[0].val_nll;
  for (const TrainLogRow& row : ra.log) {
    EXPECT_TRUE(std::isfinite(row.train_nll));
    EXPECT_GT(row.lambda, 0.0);
    best = std::min(best, row.val_nll);
  }
  EXPECT_EQ(ra.best_val_nll, best);
  EXPECT_TRUE(SameParams(a.params(), ra.best_params));
  // The restored parameters reproduce the best validation score.
  const auto nlls = TaskNlls(a, val, cfg.seed);
  double mean = 0.0;
  for (double v : nlls) mean += v / nlls.size();
  EXPECT_NEAR(mean, ra.best_val_nll, 1e-12);

  cfg.workers = 2;
  model::DpConvCnp b(model::ModelConfig::Tiny(), 1);
  const TrainResult rb = MetaTrain(b, SmallEq(), val, cfg);
  ASSERT_EQ(rb.log.size(), ra.log.size());
  for (std::size_t i = 0; i < ra.log.size(); ++i) {
    EXPECT_EQ(ra.log[i].train_nll, rb.log[i].train_nll);
    EXPECT_EQ(ra.log[i].val_nll, rb.log[i].val_nll);
  }
  EXPECT_TRUE(SameParams(a.params(), b.params()));
}

// Adam on one fixed batch with fixed noise; returns the losses before each of
// the 50 steps and after the last.
std::vector<double> FixedBatchLosses(std::uint64_t seed) {
  model::DpConvCnp m(model::ModelConfig::Tiny(), seed);
  const std::vector<taskgen::Task> batch = MakeTaskSet(SmallEq(), 4, seed);
  std::vector<dpsetconv::UnitNoise> noise;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng = MakeRng(seed, {9, i});
    noise.push_back(
        dpsetconv::DrawUnitNoise(*m.NoiseFactors(m.lengthscale()), rng));
  }
  nn::AdamState adam;
  std::vector<double> losses;
  for (int step = 0; step <= 50; ++step) {
    nn::Gradients grads = m.params().ZeroGradients();
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      model::ForwardOptions o;
      o.noise = &noise[i];
      Rng unused = MakeRng(0);
      loss += m.TaskLoss(batch[i], unused, o, &grads) / batch.size();
    }
    losses.push_back(loss);
    nn::ScaleGradients(grads, 1.0 / batch.size());
    nn::AdamStep(m.params(), grads, adam);
  }
  return losses;
}

TEST(MetaTrain, FixedBatchLossFallsInMajorityOfSeeds) {
  int passes = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const std::vector<double> losses = FixedBatchLosses(seed);
    ASSERT_EQ(losses.size(), 51u);
    passes += losses.back() < losses.front();
  }
  EXPECT_GE(passes, 2);
}

TEST(TaskNlls, RepeatableAndParallelInvariant) {
  model::DpConvCnp m(model::ModelConfig::Tiny(), 4);
  const auto tasks = MakeTaskSet(SmallEq(), 5, 6);
  const auto a = TaskNlls(m, tasks, 7);
  EXPECT_EQ(a, TaskNlls(m, tasks, 7));
  EXPECT_EQ(a, TaskNlls(m, tasks, 7, {}, 3));
  // Zero outputs at initialisation give N(0, 1) predictions.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    double want = 0.0;
    for (double y : tasks[i].target_ys) {
      want += 0.5 * std::log(2 * M_PI) + 0.5 * y * y;
    }
    EXPECT_NEAR(a[i], want / tasks[i].target_ys.size(), 1e-12);
  }
}

TEST(MakeTaskSet, ParallelMatchesSerial) {
  const auto a = MakeTaskSet(SmallEq(), 6, 11, 1);
  const auto b = MakeTaskSet(SmallEq(), 6, 11, 3);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(taskgen::TaskToJson(a[i]), taskgen::TaskToJson(b[i]));
  }
}

TEST(Summarise, NormalApproximation) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const Summary s = Summarise(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  const double se = std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0 / 4.0);
  EXPECT_NEAR(s.std_error, se, 1e-15);
  EXPECT_NEAR(s.ci_lo, 2.5 - 1.96 * se, 1e-15);
  EXPECT_NEAR(s.ci_hi, 2.5 + 1.96 * se, 1e-15);
}

TEST(WriteTrainLog, CsvHeaderAndRows) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("train_log_" + std::to_string(::getpid()) + ".csv");
  const std::vector<TrainLogRow> rows{{1, 1.5, 1.25, 0.2, 3.0},
                                      {2, 1.0, 0.75, 0.25, 6.0}};
  WriteTrainLog(path, rows);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,train_nll,val_nll,lambda,wall_ms");
  int count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, 2);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace privcnp::training
