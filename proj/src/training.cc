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

#include <algorithm>
#include <chrono>
#include <exception>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "privcnp/errors.h"
#include "privcnp/random.h"

namespace privcnp::training {
namespace {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
// handled by exactly one thread, so results written per index are
// independent of the thread count.
template <typename Fn>
void ParallelFor(std::size_t count, int workers, const Fn& fn) {
  const auto n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                            count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t w = 0; w < n_threads; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += n_threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void TrainConfig::Validate() const {
  if (steps < 0) throw DomainError("steps must be non-negative");
  if (batch_size < 1) throw DomainError("batch size must be positive");
  if (log_every < 0) throw DomainError("log cadence must be non-negative");
  if (train_targets < 0) throw DomainError("train targets must be >= 0");
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be > 0");
  if (workers < 1) throw DomainError("workers must be positive");
}

int TrainConfig::Cadence() const {
  return log_every > 0 ? log_every : std::max(1, steps / 200);
}

nlohmann::json TrainConfig::ToJson() const {
  return {{"steps", steps},
          {"batch_size", batch_size},
          {"log_every", log_every},
          {"train_targets", train_targets},
          {"learning_rate", learning_rate},
          {"seed", seed},
          {"workers", workers},
          {"enable_clip", flags.enable_clip},
          {"enable_density_noise", flags.enable_density_noise},
          {"enable_signal_noise", flags.enable_signal_noise}};
}

TrainConfig TrainConfig::FromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.steps = j.value("steps", c.steps);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.log_every = j.value("log_every", c.log_every);
  c.train_targets = j.value("train_targets", c.train_targets);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.flags.enable_clip = j.value("enable_clip", c.flags.enable_clip);
  c.flags.enable_density_noise =
      j.value("enable_density_noise", c.flags.enable_density_noise);
  c.flags.enable_signal_noise =
      j.value("enable_signal_noise", c.flags.enable_signal_noise);
  c.Validate();
  return c;
}

model::ForwardOptions OptionsFor(const dpsetconv::MechanismFlags& flags) {
  model::ForwardOptions options;
  options.flags = flags;
  options.mode = flags.AllEnabled() ? dpsetconv::EncodeMode::kDeploy
                                    : dpsetconv::EncodeMode::kTraining;
  return options;
}

std::vector<taskgen::Task> MakeTaskSet(const taskgen::GeneratorConfig& gen,
                                       int count, std::uint64_t seed,
                                       int workers) {
  if (count < 0) throw DomainError("task count must be non-negative");
  gen.Validate();
  std::vector<taskgen::Task> tasks(static_cast<std::size_t>(count));
  ParallelFor(tasks.size(), workers, [&](std::size_t i) {
    Rng rng = MakeRng(seed, {4, static_cast<std::uint64_t>(i)});
    tasks[i] = taskgen::GenTask(gen, rng);
  });
  return tasks;
}

std::vector<double> TaskNlls(const model::DpConvCnp& model,
                             std::span<const taskgen::Task> tasks,
                             std::uint64_t seed,
                             const model::ForwardOptions& options,
                             int workers) {
  std::vector<double> nlls(tasks.size());
  ParallelFor(tasks.size(), workers, [&](std::size_t i) {
    Rng rng = MakeRng(seed, {3, static_cast<std::uint64_t>(i)});
    nlls[i] = model.TaskLoss(tasks[i], rng, options, nullptr);
  });
  return nlls;
}

TrainResult MetaTrain(model::DpConvCnp& model,
                      const taskgen::GeneratorConfig& gen,
                      std::span<const taskgen::Task> validation,
                      const TrainConfig& config,
                      const std::function<void(const TrainLogRow&)>& on_log) {
  config.Validate();
  gen.Validate();
  if (validation.empty()) throw DomainError("empty validation set");
  taskgen::GeneratorConfig train_gen = gen;
  if (config.train_targets > 0) train_gen.target_count = config.train_targets;
  const model::ForwardOptions options = OptionsFor(config.flags);
  const int cadence = config.Cadence();
  const auto batch = static_cast<std::size_t>(config.batch_size);

  TrainResult result;
  result.best_params = model.params();
  result.best_val_nll = std::numeric_limits<double>::infinity();
  nn::AdamState adam;
  adam.learning_rate = config.learning_rate;
  const auto start = std::chrono::steady_clock::now();

  double train_sum = 0.0;
  int train_count = 0;
  std::vector<nn::Gradients> task_grads(batch);
  std::vector<double> task_losses(batch);
  for (int step = 1; step <= config.steps; ++step) {
    ParallelFor(batch, config.workers, [&](std::size_t b) {
      const auto s = static_cast<std::uint64_t>(step);
      Rng task_rng = MakeRng(config.seed, {1, s, b});
      Rng noise_rng = MakeRng(config.seed, {2, s, b});
      const taskgen::Task task = taskgen::GenTask(train_gen, task_rng);
      task_grads[b] = model.params().ZeroGradients();
      task_losses[b] = model.TaskLoss(task, noise_rng, options, &task_grads[b]);
    });
    nn::Gradients grads = model.params().ZeroGradients();
    double loss = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      if (!std::isfinite(task_losses[b])) {
        spdlog::error("non-finite loss at step {} task {}: {}", step, b,
                      task_losses[b]);
        throw NumericalError("non-finite training loss at step " +
                             std::to_string(step));
      }
      loss += task_losses[b];
      nn::AccumulateGradients(task_grads[b], grads);
    }
    nn::ScaleGradients(grads, 1.0 / static_cast<double>(batch));
    nn::AdamStep(model.params(), grads, adam);
    train_sum += loss / static_cast<double>(batch);
    ++train_count;

    if (step % cadence == 0) {
      const std::vector<double> val =
          TaskNlls(model, validation, config.seed, options, config.workers);
      TrainLogRow row;
      row.step = step;
      row.train_nll = train_sum / train_count;
      row.val_nll = Summarise(val).mean;
      row.lambda = model.lengthscale();
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      if (!std::isfinite(row.val_nll)) {
        throw NumericalError("non-finite validation loss at step " +
                             std::to_string(step));
      }
      if (row.val_nll < result.best_val_nll) {
        result.best_val_nll = row.val_nll;
        result.best_step = step;
        result.best_params = model.params();
      }
      spdlog::info("step {} train {:.4f} val {:.4f} lambda {:.4f}", step,
                   row.train_nll, row.val_nll, row.lambda);
      result.log.push_back(row);
      if (on_log) on_log(row);
      train_sum = 0.0;
      train_count = 0;
    }
  }
  if (result.best_step > 0) model.params() = result.best_params;
  return result;
}

void WriteTrainLog(const std::filesystem::path& path,
                   std::span<const TrainLogRow> rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "step,train_nll,val_nll,lambda,wall_ms\n";
  for (const TrainLogRow& r : rows) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.step,
                       r.train_nll, r.val_nll, r.lambda, r.wall_ms);
  }
}

Summary Summarise(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (s.count == 0) throw DomainError("summary of no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(s.count - 1) /
                            static_cast<double>(s.count));
  }
  s.ci_lo = s.mean - 1.96 * s.std_error;
  s.ci_hi = s.mean + 1.96 * s.std_error;
  return s;
}

}  // namespace privcnp::training
