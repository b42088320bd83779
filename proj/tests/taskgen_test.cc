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

#include "privcnp/taskgen.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "privcnp/errors.h"
#include "privcnp/random.h"

namespace privcnp::taskgen {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("taskgen_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path Write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

bool SameTask(const Task& a, const Task& b) {
  return a.context.xs == b.context.xs && a.context.ys == b.context.ys &&
         a.target_xs == b.target_xs && a.target_ys == b.target_ys &&
         a.budget.epsilon == b.budget.epsilon &&
         a.budget.delta == b.budget.delta && a.meta.family == b.meta.family &&
         a.meta.lengthscale == b.meta.lengthscale &&
         a.meta.period == b.meta.period &&
         a.meta.noise_scale == b.meta.noise_scale &&
         a.meta.direction == b.meta.direction && a.meta.phase == b.meta.phase;
}

TEST(GenGpTask, FixedSeedIsIdentical) {
  const GeneratorConfig cfg = GeneratorConfig::Eq(1.0);
  Rng a = MakeRng(5);
  Rng b = MakeRng(5);
  EXPECT_TRUE(SameTask(GenGpTask(cfg, a), GenGpTask(cfg, b)));
}

TEST(GenGpTask, SizesAndRanges) {
  GeneratorConfig cfg = GeneratorConfig::Eq(0.5);
  cfg.context_size = {5, 5};
  Rng rng = MakeRng(1);
  const Task task = GenGpTask(cfg, rng);
  EXPECT_EQ(task.context.size(), 5u);
  EXPECT_EQ(task.target_xs.size(), 512u);
  for (double x : task.context.xs) {
    EXPECT_GE(x, -2.0);
    EXPECT_LE(x, 2.0);
  }
  for (double x : task.target_xs) {
    EXPECT_GE(x, -6.0);
    EXPECT_LE(x, 6.0);
  }
  EXPECT_GE(task.budget.epsilon, 0.9);
  EXPECT_LE(task.budget.epsilon, 4.0);
  EXPECT_EQ(task.budget.delta, 1e-3);

  Rng eval_rng = MakeRng(2);
  const Task eval = GenGpTask(cfg.ForEvaluation(), eval_rng);
  for (double x : eval.target_xs) {
    EXPECT_GE(x, -2.0);
    EXPECT_LE(x, 2.0);
  }
}

TEST(GenGpTask, DefaultContextSizeRange) {
  const GeneratorConfig cfg = GeneratorConfig::Eq(1.0);
  Rng rng = MakeRng(3);
  std::size_t lo = 1000;
  std::size_t hi = 0;
  for (int i = 0; i < 300; ++i) {
    GeneratorConfig small = cfg;
    small.target_count = 0;
    const Task t = GenGpTask(small, rng);
    lo = std::min(lo, t.context.size());
    hi = std::max(hi, t.context.size());
  }
  EXPECT_GE(lo, 1u);
  EXPECT_LE(hi, 512u);
  EXPECT_GT(hi, 400u);
  EXPECT_LT(lo, 100u);
}

// Pins a context point at x = 0 and a target at x = 0.5 and compares the
// empirical joint moments with the noisy GP prior.
TEST(GenGpTask, MarginalsMatchPriorMonteCarlo) {
  GeneratorConfig cfg = GeneratorConfig::Eq(1.0);
  cfg.context_size = {1, 1};
  cfg.context_inputs = Range::Fixed(0.0);
  cfg.target_inputs = Range::Fixed(0.5);
  cfg.target_count = 1;
  const double sv2 = cfg.signal_scale * cfg.signal_scale;
  const double sn2 = cfg.noise_scale.lo * cfg.noise_scale.lo;
  const int n = 20000;
  double sc = 0, sc2 = 0, st2 = 0, sct = 0;
  Rng rng = MakeRng(17);
  for (int i = 0; i < n; ++i) {
    const Task t = GenGpTask(cfg, rng);
    const double c = t.context.ys[0];
    const double y = t.target_ys[0];
    sc += c;
    sc2 += c * c;
    st2 += y * y;
    sct += c * y;
  }
  const double var = sv2 + sn2;
  const double se = var * std::sqrt(2.0 / n);
  EXPECT_NEAR(sc / n, 0.0, 3 * std::sqrt(var / n));
  EXPECT_NEAR(sc2 / n, var, 3 * se);
  EXPECT_NEAR(st2 / n, var, 3 * se);
  const double cov = sv2 * std::exp(-0.125);
  EXPECT_NEAR(sct / n, cov, 3 * std::sqrt((var * var + cov * cov) / n));
}

TEST(SawtoothSignal, OddSymmetry) {
  for (double x : {-1.3, 0.0, 0.2, 0.77, 2.9}) {
    EXPECT_NEAR(SawtoothSignal(x, 1.7, +1, 0.0),
                -SawtoothSignal(-x, 1.7, +1, 0.0), 1e-15);
    EXPECT_NEAR(SawtoothSignal(x, 1.7, -1, 0.0),
                SawtoothSignal(-x, 1.7, +1, 0.0), 1e-15);
  }
}

TEST(SawtoothSignal, BoundedAndPeriodic) {
  Rng rng = MakeRng(8);
  const double bound = 2.0 / std::numbers::pi * 1.5;
  for (int i = 0; i < 2000; ++i) {
    const double x = Uniform(rng, -6, 6);
    const double tau = Uniform(rng, 0.8, 5.0);
    const int d = i % 2 == 0 ? 1 : -1;
    const double phi = Uniform(rng, 0, 2 * std::numbers::pi);
    const double f = SawtoothSignal(x, tau, d, phi);
    EXPECT_LE(std::abs(f), bound);
    EXPECT_NEAR(SawtoothSignal(x + tau, tau, d, phi), f, 1e-12);
  }
}

TEST(SawtoothSignal, MatchesSeries) {
  const double x = 0.37, tau = 1.9, phi = 1.1;
  const double u = 2 * std::numbers::pi * (-x / tau);
  const double want =
      2 / std::numbers::pi * (std::sin(u + phi) + std::sin(2 * u + phi) / 2);
  EXPECT_NEAR(SawtoothSignal(x, tau, -1, phi), want, 1e-15);
}

TEST(GenSawtoothTask, NoiseAroundSignalAndDeterminism) {
  GeneratorConfig cfg = GeneratorConfig::Sawtooth(0.5);
  Rng a = MakeRng(4);
  Rng b = MakeRng(4);
  const Task t = GenSawtoothTask(cfg, a);
  EXPECT_TRUE(SameTask(t, GenSawtoothTask(cfg, b)));
  EXPECT_TRUE(t.meta.direction == 1 || t.meta.direction == -1);
  EXPECT_EQ(t.meta.period, 2.0);
  EXPECT_EQ(t.meta.noise_scale, 0.05);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.target_xs.size(); ++i) {
    const double r = t.target_ys[i] - SawtoothSignal(t.target_xs[i], 2.0,
                                                     t.meta.direction,
                                                     t.meta.phase);
    ss += r * r;
  }
  const double n = static_cast<double>(t.target_xs.size());
  EXPECT_NEAR(ss / n, 0.0025, 3 * 0.0025 * std::sqrt(2.0 / n));
}

TEST(GenSawtoothTask, BothDirectionsOccur) {
  const GeneratorConfig cfg = GeneratorConfig::Sawtooth(1.0);
  Rng rng = MakeRng(6);
  std::set<int> seen;
  for (int i = 0; i < 50; ++i) {
    GeneratorConfig small = cfg;
    small.target_count = 1;
    seen.insert(GenSawtoothTask(small, rng).meta.direction);
  }
  EXPECT_EQ(seen, (std::set<int>{-1, 1}));
}

TEST(SampleBudget, Examples) {
  GeneratorConfig cfg = GeneratorConfig::Eq(1.0);
  cfg.epsilon = Range::Fixed(1.0);
  cfg.delta = 1e-5;
  Rng rng = MakeRng(2);
  for (int i = 0; i < 10; ++i) {
    const auto b = SampleBudget(cfg, rng);
    EXPECT_EQ(b.epsilon, 1.0);
    EXPECT_EQ(b.delta, 1e-5);
  }
  cfg.epsilon = {0.9, 4.0};
  double lo = 10, hi = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto b = SampleBudget(cfg, rng);
    EXPECT_NO_THROW(b.Validate());
    lo = std::min(lo, b.epsilon);
    hi = std::max(hi, b.epsilon);
  }
  EXPECT_GE(lo, 0.9);
  EXPECT_LE(hi, 4.0);
}

TEST(GeneratorConfig, RejectsBadRanges) {
  GeneratorConfig cfg = GeneratorConfig::Eq(1.0);
  cfg.context_size = {5, 2};
  EXPECT_THROW(cfg.Validate(), DomainError);
  cfg = GeneratorConfig::Eq(1.0);
  cfg.lengthscale = {2.0, 1.0};
  EXPECT_THROW(cfg.Validate(), DomainError);
  cfg = GeneratorConfig::Eq(-1.0);
  EXPECT_THROW(cfg.Validate(), DomainError);
}

using RealData = TempDir;

TEST_F(RealData, TwoRowsMapToUnitInterval) {
  const fs::path p = Write("toy.csv", "age,weight\n0,10\n100,30\n");
  const PointSet pts = LoadRealDataset(p, "age", "weight");
  EXPECT_EQ(pts.xs, (std::vector<double>{-1.0, 1.0}));
  EXPECT_NEAR(pts.ys[0] + pts.ys[1], 0.0, 1e-12);
  EXPECT_NEAR(pts.norm.DenormaliseY(pts.ys[1]), 30.0, 1e-12);
}

TEST_F(RealData, StandardisedOutputs) {
  std::string text = "height,age,weight\n";
  Rng rng = MakeRng(3);
  for (int i = 0; i < 57; ++i) {
    text += std::to_string(Uniform(rng, 50, 180)) + "," +
            std::to_string(Uniform(rng, 0, 20)) + "," +
            std::to_string(Uniform(rng, 3, 80)) + "\n";
  }
  const PointSet pts = LoadRealDataset(Write("d.csv", text), "age", "height");
  double mean = 0.0;
  for (double y : pts.ys) mean += y;
  mean /= pts.ys.size();
  double var = 0.0;
  for (double y : pts.ys) var += (y - mean) * (y - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(var / pts.ys.size()), 1.0, 1e-12);
  for (double x : pts.xs) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
}

TEST_F(RealData, IngestionErrors) {
  EXPECT_THROW(LoadRealDataset(Write("a.csv", "age,w\n1,2\n2,2\n"), "age", "w"),
               DataError);
  EXPECT_THROW(LoadRealDataset(Write("b.csv", "age,w\n1,2\n"), "age", "w"),
               DataError);
  EXPECT_THROW(LoadRealDataset(Write("c.csv", "age,w\n1,2\nx,3\n"), "age", "w"),
               DataError);
  EXPECT_THROW(LoadRealDataset(Write("d.csv", "age,w\n1,2\n2,3\n"), "age", "h"),
               DataError);
  EXPECT_THROW(LoadRealDataset(dir_ / "missing.csv", "age", "w"), DataError);
}

TEST(SplitRealTask, PartitionsPoints) {
  PointSet pts;
  for (int i = 0; i < 20; ++i) {
    pts.xs.push_back(i);
    pts.ys.push_back(-i);
  }
  Rng a = MakeRng(9);
  const Task t = SplitRealTask(pts, 7, a, {1.0, 1e-3});
  EXPECT_EQ(t.context.size(), 7u);
  EXPECT_EQ(t.target_xs.size(), 13u);
  std::multiset<double> all(t.context.xs.begin(), t.context.xs.end());
  all.insert(t.target_xs.begin(), t.target_xs.end());
  EXPECT_EQ(all, std::multiset<double>(pts.xs.begin(), pts.xs.end()));
  for (std::size_t i = 0; i < t.context.size(); ++i) {
    EXPECT_EQ(t.context.ys[i], -t.context.xs[i]);
  }
  Rng b = MakeRng(9);
  EXPECT_TRUE(SameTask(t, SplitRealTask(pts, 7, b, {1.0, 1e-3})));
  Rng c = MakeRng(1);
  EXPECT_EQ(SplitRealTask(pts, 19, c, {1.0, 1e-3}).target_xs.size(), 1u);
  EXPECT_THROW(SplitRealTask(pts, 20, c, {1.0, 1e-3}), DomainError);
}

using TaskFiles = TempDir;

TEST_F(TaskFiles, RoundTripIsBitEqual) {
  std::vector<Task> tasks;
  Rng rng = MakeRng(10);
  for (int i = 0; i < 100; ++i) {
    GeneratorConfig cfg = i % 2 == 0 ? GeneratorConfig::EqAmortised()
                                     : GeneratorConfig::SawtoothAmortised();
    cfg.context_size = {0, 20};
    cfg.target_count = 15;
    tasks.push_back(GenTask(cfg, rng));
  }
  const fs::path p = dir_ / "tasks.jsonl";
  WriteTasks(p, tasks);
  const std::vector<Task> back = ReadTasks(p);
  ASSERT_EQ(back.size(), tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    EXPECT_TRUE(SameTask(tasks[i], back[i])) << i;
    EXPECT_EQ(TaskToJson(tasks[i]), TaskToJson(back[i]));
  }
}

TEST_F(TaskFiles, EmptyFileAndErrors) {
  EXPECT_TRUE(ReadTasks(Write("empty.jsonl", "")).empty());
  Rng rng = MakeRng(1);
  GeneratorConfig cfg = GeneratorConfig::Eq(1.0);
  cfg.context_size = {2, 2};
  cfg.target_count = 2;
  const std::string good = TaskToJson(GenTask(cfg, rng));
  const std::string bad = good.substr(0, good.size() / 2);
  try {
    ReadTasks(Write("bad.jsonl", good + "\n" + good + "\n" + bad + "\n"));
    FAIL() << "expected a parse error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ReadTasks(Write("arr.jsonl", "[1,2]\n")), DataError);
  EXPECT_THROW(ReadTasks(Write("missing.jsonl", "{\"cx\":[1]}\n")), DataError);
}

}  // namespace
}  // namespace privcnp::taskgen
