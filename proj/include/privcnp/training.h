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


// Meta-training loop and evaluation helpers for the DPConvCNP.

#ifndef PRIVCNP_TRAINING_H_
#define PRIVCNP_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"
#include "privcnp/dpsetconv.h"
#include "privcnp/model.h"
#include "privcnp/nn/params.h"
#include "privcnp/taskgen.h"

namespace privcnp::training {

struct TrainConfig {
  int steps = 20000;
  int batch_size = 16;
  // Validation and log cadence in steps; 0 means steps / 200 (at least 1).
  int log_every = 0;
  // Targets per training task; 0 keeps the generator's count.
  int train_targets = 0;
  double learning_rate = 3e-4;
  std::uint64_t seed = 1;
  int workers = 1;
  // Anything other than all-enabled trains an ablation; the mechanism then
  // runs in training mode.
  dpsetconv::MechanismFlags flags;

  void Validate() const;
  int Cadence() const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json& j);
};

struct TrainLogRow {
  int step = 0;
  double train_nll = 0.0;  // mean batch loss since the previous row
  double val_nll = 0.0;
  double lambda = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  nn::ParamStore best_params;
  double best_val_nll = 0.0;
  int best_step = 0;
  std::vector<TrainLogRow> log;
};

model::ForwardOptions OptionsFor(const dpsetconv::MechanismFlags& flags);

// Fixed validation tasks; task i uses the stream MakeRng(seed, {4, i}).
std::vector<taskgen::Task> MakeTaskSet(const taskgen::GeneratorConfig& gen,
                                       int count, std::uint64_t seed,
                                       int workers = 1);

// Per-task NLLs with noise stream MakeRng(seed, {3, i}) for task i, so
// repeated calls see the same noise.
std::vector<double> TaskNlls(const model::DpConvCnp& model,
                             std::span<const taskgen::Task> tasks,
                             std::uint64_t seed,
                             const model::ForwardOptions& options = {},
                             int workers = 1);

// Algorithm: per step draw batch_size fresh tasks and noise, average the
// task losses, back-propagate and take one Adam step. Every Cadence() steps
// the mean validation NLL is logged and the best parameters kept. On return
// the model holds the best parameters (unchanged when steps == 0).
TrainResult MetaTrain(model::DpConvCnp& model,
                      const taskgen::GeneratorConfig& gen,
                      std::span<const taskgen::Task> validation,
                      const TrainConfig& config,
                      const std::function<void(const TrainLogRow&)>& on_log =
                          {});

void WriteTrainLog(const std::filesystem::path& path,
                   std::span<const TrainLogRow> rows);

// Mean with a normal-approximation 95% interval.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};
Summary Summarise(std::span<const double> values);

}  // namespace privcnp::training

#endif  // PRIVCNP_TRAINING_H_
