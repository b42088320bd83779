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

// Meta-learning tasks: synthetic generators, privacy budget sampling, real
// data ingestion and JSON-lines persistence.

#ifndef PRIVCNP_TASKGEN_H_
#define PRIVCNP_TASKGEN_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "privcnp/accounting.h"
#include "privcnp/dpsetconv.h"
#include "privcnp/kernel_gp.h"
#include "privcnp/random.h"

namespace privcnp::taskgen {

// Closed interval; lo == hi means a fixed value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  static Range Fixed(double v) { return {v, v}; }
  void Validate(const char* what) const;
  double Sample(Rng& rng) const { return Uniform(rng, lo, hi); }
};

struct IntRange {
  int lo = 1;
  int hi = 1;

  void Validate(const char* what) const;
  int Sample(Rng& rng) const;
};

// Generator record stored with every task.
struct TaskMeta {
  std::string family;
  double lengthscale = 0.0;   // GP families
  double period = 0.0;        // sawtooth
  double signal_scale = 0.0;
  double noise_scale = 0.0;
  int direction = 0;          // sawtooth, +1 or -1
  double phase = 0.0;         // sawtooth

  gp::KernelSpec Kernel() const;
};

struct Task {
  dpsetconv::ContextSet context;
  std::vector<double> target_xs;
  std::vector<double> target_ys;
  accounting::PrivacyBudget budget;
  TaskMeta meta;

  void Validate() const;
};

struct GeneratorConfig {
  gp::KernelFamily family = gp::KernelFamily::kEq;
  Range lengthscale = Range::Fixed(1.0);
  Range inverse_period = Range::Fixed(1.0);
  double signal_scale = 1.0;
  Range noise_scale = Range::Fixed(0.2);
  IntRange context_size{1, 512};
  Range context_inputs{-2.0, 2.0};
  Range target_inputs{-6.0, 6.0};
  int target_count = 512;
  Range epsilon{0.9, 4.0};
  double delta = 1e-3;

  void Validate() const;

  // EQ GP with a fixed lengthscale, training-time input ranges.
  static GeneratorConfig Eq(double lengthscale);
  // EQ GP with lengthscale ~ U[0.20, 2.50].
  static GeneratorConfig EqAmortised();
  // Sawtooth with fixed 1/tau and observation noise 0.05.
  static GeneratorConfig Sawtooth(double inverse_period);
  // Sawtooth with 1/tau ~ U[0.20, 1.25].
  static GeneratorConfig SawtoothAmortised();
  // Matern-3/2 simulator for the sim-to-real study: l ~ U[0.5, 2],
  // noise ~ U[0.3, 0.8], inputs in [-1, 1].
  static GeneratorConfig SimToReal();

  // Copy with targets drawn from the context input range, as at evaluation.
  GeneratorConfig ForEvaluation() const;
};

accounting::PrivacyBudget SampleBudget(const GeneratorConfig& cfg, Rng& rng);

Task GenGpTask(const GeneratorConfig& cfg, Rng& rng);
Task GenSawtoothTask(const GeneratorConfig& cfg, Rng& rng);
// Dispatches on cfg.family.
Task GenTask(const GeneratorConfig& cfg, Rng& rng);

// (2/pi) sum_{m=1}^{2} sin(2 m pi (d x / tau) + phase) / m.
double SawtoothSignal(double x, double period, int direction, double phase);

// Affine input map to [-1, 1] and output standardisation. The statistics are
// treated as public.
struct Normalisation {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_mean = 0.0;
  double y_std = 1.0;

  double NormaliseX(double x) const {
    return 2.0 * (x - x_min) / (x_max - x_min) - 1.0;
  }
  double NormaliseY(double y) const { return (y - y_mean) / y_std; }
  double DenormaliseY(double y) const { return y * y_std + y_mean; }
};

struct PointSet {
  std::vector<double> xs;
  std::vector<double> ys;
  Normalisation norm;
};

// Reads a comma-separated file with a header row and normalises the named
// columns. Throws DataError on a missing column, a non-numeric cell, fewer
// than two rows or a constant column.
PointSet LoadRealDataset(const std::filesystem::path& path,
                         const std::string& input_column,
                         const std::string& output_column);

// Uniform random context subset of size n; every other point is a target.
Task SplitRealTask(const PointSet& points, int n, Rng& rng,
                   const accounting::PrivacyBudget& budget);

// One JSON object per line:
// {"cx":[...],"cy":[...],"tx":[...],"ty":[...],"eps":E,"delta":D,"meta":{...}}
std::string TaskToJson(const Task& task);
Task TaskFromJson(const std::string& line);
void WriteTasks(const std::filesystem::path& path, std::span<const Task> tasks);
std::vector<Task> ReadTasks(const std::filesystem::path& path);

}  // namespace privcnp::taskgen

#endif  // PRIVCNP_TASKGEN_H_
