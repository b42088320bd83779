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


// Command-line front end: accounting, grid noise, task generation, training,
// evaluation and reference predictors.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "privcnp/accounting.h"
#include "privcnp/dpsetconv.h"
#include "privcnp/errors.h"
#include "privcnp/grid_sampler.h"
#include "privcnp/kernel_gp.h"
#include "privcnp/model.h"
#include "privcnp/nn/checkpoint.h"
#include "privcnp/oracle.h"
#include "privcnp/random.h"
#include "privcnp/taskgen.h"
#include "privcnp/training.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace privcnp;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::string JsonScalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Fills options not given on the command line from a flat JSON object keyed
// by long flag names.
void ApplyJsonConfig(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(path + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw DomainError(path + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const json& v : value) opt->add_result(JsonScalar(v));
    } else {
      opt->add_result(JsonScalar(value));
    }
    opt->run_callback();
  }
}

// Options that may come from either the command line or the config file.
void RequireOptions(CLI::App* cmd, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    if (cmd->get_option(name)->count() == 0) {
      throw DomainError(cmd->get_name() + ": " + name + " is required");
    }
  }
}

std::string Num(double v) { return fmt::format("{:.17g}", v); }

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void ConfigureLogging() {
  auto logger = spdlog::stderr_color_mt("privcnp");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("PRIVCNP_LOG");
  const std::string level = env != nullptr ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

// ---------------------------------------------------------------------------
// account, compare-accountants

struct AccountArgs {
  double eps = 1.0;
  double delta = 1e-3;
  double sensitivity_sq = 1.0;
};

void RunAccount(const AccountArgs& a) {
  const accounting::PrivacyBudget budget{a.eps, a.delta};
  budget.Validate();
  if (!(a.sensitivity_sq > 0.0)) {
    throw DomainError("sensitivity-sq must be positive");
  }
  const double sens = std::sqrt(a.sensitivity_sq);
  std::cout << "mu " << Num(accounting::MuFromBudget(budget)) << "\n";
  std::cout << "sigma_classical "
            << (a.eps <= 1.0
                    ? Num(accounting::ClassicalFunctionalSigma(sens, budget))
                    : std::string("n/a"))
            << "\n";
  std::cout << "sigma_rdp "
            << Num(accounting::RdpFunctionalSigma(sens, budget)) << "\n";
  std::cout << "sigma_gdp "
            << Num(accounting::GdpFunctionalSigma(sens, budget)) << "\n";
}

struct CompareArgs {
  double sensitivity_sq = 10.0;
  double delta = 1e-3;
  double eps_min = 0.05;
  double eps_max = 3.0;
  int steps = 60;
  std::string out;
};

void RunCompare(const CompareArgs& a) {
  if (a.steps < 1) throw DomainError("steps must be positive");
  if (!(a.eps_max >= a.eps_min)) throw DomainError("eps-max < eps-min");
  const double sens = std::sqrt(a.sensitivity_sq);
  std::ofstream out = OpenOut(a.out);
  out << "eps,sigma_classical,sigma_rdp,sigma_gdp\n";
  for (int i = 0; i < a.steps; ++i) {
    const double eps =
        a.steps == 1 ? a.eps_min
                     : a.eps_min + (a.eps_max - a.eps_min) * i / (a.steps - 1);
    const accounting::PrivacyBudget budget{eps, a.delta};
    budget.Validate();
    const std::string classical =
        eps <= 1.0 ? Num(accounting::ClassicalFunctionalSigma(sens, budget))
                   : std::string();
    out << Num(eps) << "," << classical << ","
        << Num(accounting::RdpFunctionalSigma(sens, budget)) << ","
        << Num(accounting::GdpFunctionalSigma(sens, budget)) << "\n";
  }
}

// ---------------------------------------------------------------------------
// sample-grid-noise

struct NoiseArgs {
  std::string grid = "0:0.03125:448";
  double lengthscale = 0.2;
  std::uint64_t seed = 0;
  std::string out;
};

void RunSampleNoise(const NoiseArgs& a) {
  const grid::GridSpec spec = grid::GridSpec::Parse(a.grid);
  if (!(a.lengthscale > 0.0)) throw DomainError("lengthscale must be > 0");
  std::vector<grid::Kernel1d> kernels(spec.dims(),
                                      grid::RbfKernel(a.lengthscale));
  const grid::GridFactors factors = grid::PerDimFactors(spec, kernels);
  Rng rng = MakeRng(a.seed, {});
  const std::vector<double> field = grid::KroneckerSample(factors, rng);
  const std::vector<std::vector<double>> points = grid::GridPoints(spec);
  std::ofstream out = OpenOut(a.out);
  for (std::size_t d = 0; d < spec.dims(); ++d) out << "x" << d << ",";
  out << "value\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (double x : points[i]) out << Num(x) << ",";
    out << Num(field[i]) << "\n";
  }
}

// ---------------------------------------------------------------------------
// gen-tasks

struct GenArgs {
  std::string family = "eq";
  std::optional<double> lengthscale;
  std::optional<double> inverse_period;
  std::optional<int> min_context;
  std::optional<int> max_context;
  std::optional<int> targets;
  bool evaluation = false;
  int count = 2048;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
};

taskgen::GeneratorConfig GeneratorFor(const std::string& family,
                                      std::optional<double> lengthscale,
                                      std::optional<double> inverse_period) {
  taskgen::GeneratorConfig cfg;
  if (family == "eq") {
    cfg = taskgen::GeneratorConfig::Eq(lengthscale.value_or(1.0));
  } else if (family == "eq-amortised") {
    cfg = taskgen::GeneratorConfig::EqAmortised();
  } else if (family == "matern32") {
    cfg = taskgen::GeneratorConfig::Eq(lengthscale.value_or(1.0));
    cfg.family = gp::KernelFamily::kMatern32;
  } else if (family == "sawtooth") {
    cfg = taskgen::GeneratorConfig::Sawtooth(inverse_period.value_or(1.0));
  } else if (family == "sawtooth-amortised") {
    cfg = taskgen::GeneratorConfig::SawtoothAmortised();
  } else if (family == "sim-to-real") {
    cfg = taskgen::GeneratorConfig::SimToReal();
  } else {
    throw DomainError("unknown task family '" + family + "'");
  }
  return cfg;
}

void RunGenTasks(const GenArgs& a) {
  taskgen::GeneratorConfig cfg =
      GeneratorFor(a.family, a.lengthscale, a.inverse_period);
  if (a.evaluation) cfg = cfg.ForEvaluation();
  if (a.min_context) cfg.context_size.lo = *a.min_context;
  if (a.max_context) cfg.context_size.hi = *a.max_context;
  if (a.targets) cfg.target_count = *a.targets;
  const std::vector<taskgen::Task> tasks =
      training::MakeTaskSet(cfg, a.count, a.seed, a.workers);
  if (fs::path(a.out).has_parent_path()) {
    fs::create_directories(fs::path(a.out).parent_path());
  }
  taskgen::WriteTasks(a.out, tasks);
  spdlog::info("wrote {} tasks to {}", tasks.size(), a.out);
}

// ---------------------------------------------------------------------------
// train, eval

struct TrainArgs {
  std::string family = "eq";
  std::optional<double> lengthscale;
  std::optional<double> inverse_period;
  std::string preset = "tiny";
  std::optional<int> depth;
  std::optional<int> width;
  std::optional<int> points_per_unit;
  std::string ablation = "none";
  std::optional<double> fixed_clip;
  std::optional<double> fixed_t;
  int validation_tasks = 2048;
  training::TrainConfig train;
  std::string out;
};

void RunTrain(TrainArgs a) {
  const taskgen::GeneratorConfig gen =
      GeneratorFor(a.family, a.lengthscale, a.inverse_period);
  model::ModelConfig mc;
  if (a.preset == "tiny") {
    mc = model::ModelConfig::Tiny();
  } else if (a.preset == "full") {
    mc = model::ModelConfig::Full();
  } else {
    throw DomainError("unknown preset '" + a.preset + "'");
  }
  if (a.depth) mc.depth = *a.depth;
  if (a.width) mc.width = *a.width;
  if (a.points_per_unit) mc.points_per_unit = *a.points_per_unit;
  if (a.ablation == "signal-only") {
    a.train.flags = {.enable_clip = false,
                     .enable_density_noise = false,
                     .enable_signal_noise = true};
  } else if (a.ablation != "none") {
    throw DomainError("unknown ablation '" + a.ablation + "'");
  }
  mc.fixed_clip = a.fixed_clip;
  mc.fixed_t = a.fixed_t;
  mc.Validate();
  a.train.Validate();

  model::DpConvCnp net(mc, a.train.seed);
  const std::vector<taskgen::Task> validation = training::MakeTaskSet(
      gen, a.validation_tasks, a.train.seed ^ 0x76616c, a.train.workers);
  const training::TrainResult result =
      training::MetaTrain(net, gen, validation, a.train);

  const fs::path dir(a.out);
  json extra = {{"model", mc.ToJson()},
                {"train", a.train.ToJson()},
                {"family", a.family},
                {"best_step", result.best_step},
                {"best_val_nll", result.best_val_nll}};
  if (a.lengthscale) extra["lengthscale"] = *a.lengthscale;
  if (a.inverse_period) extra["inverse_period"] = *a.inverse_period;
  nn::SaveCheckpoint(dir, net.params(), extra);
  training::WriteTrainLog(dir / "train_log.csv", result.log);
  spdlog::info("best validation NLL {} at step {}", result.best_val_nll,
               result.best_step);
}

struct EvalArgs {
  std::string ckpt;
  std::string tasks;
  std::uint64_t seed = 0;
  std::string out;
};

void RunEval(const EvalArgs& a) {
  const nn::Checkpoint ckpt = nn::LoadCheckpoint(a.ckpt);
  if (!ckpt.config.contains("model")) {
    throw DataError(a.ckpt + ": checkpoint has no model config");
  }
  model::ModelConfig mc;
  training::TrainConfig tc;
  try {
    mc = model::ModelConfig::FromJson(ckpt.config.at("model"));
    tc = training::TrainConfig::FromJson(ckpt.config.value("train", json{}));
  } catch (const json::exception& e) {
    throw DataError(a.ckpt + ": bad checkpoint config: " + e.what());
  }
  const model::DpConvCnp net(mc, ckpt.params);
  const std::vector<taskgen::Task> tasks = taskgen::ReadTasks(a.tasks);
  if (tasks.empty()) throw DataError(a.tasks + ": no tasks");
  const std::vector<double> nlls =
      training::TaskNlls(net, tasks, a.seed, training::OptionsFor(tc.flags));
  const training::Summary s = training::Summarise(nlls);
  std::ofstream out = OpenOut(a.out);
  out << "task,nll\n";
  for (std::size_t i = 0; i < nlls.size(); ++i) {
    out << i << "," << Num(nlls[i]) << "\n";
  }
  out << "mean," << Num(s.mean) << "\n";
  out << "ci95_lo," << Num(s.ci_lo) << "\n";
  out << "ci95_hi," << Num(s.ci_hi) << "\n";
  std::cout << "mean_nll " << Num(s.mean) << " ci95 " << Num(s.ci_lo) << " "
            << Num(s.ci_hi) << " tasks " << s.count << "\n";
}

// ---------------------------------------------------------------------------
// oracle, lower-bound

struct OracleArgs {
  // Empty means the family recorded in the task file.
  std::string family;
  std::optional<double> lengthscale;
  std::optional<double> noise_scale;
  std::string tasks;
  std::string out;
};

// Kernel for a task: the task's own metadata unless overridden.
gp::KernelSpec KernelFor(const taskgen::Task& task, const std::string& family,
                         std::optional<double> lengthscale,
                         std::optional<double> noise_scale) {
  gp::KernelSpec spec = task.meta.Kernel();
  spec.family = gp::ParseFamily(family);
  if (lengthscale) spec.lengthscale = *lengthscale;
  if (noise_scale) spec.noise_scale = *noise_scale;
  spec.Validate();
  return spec;
}

void RunOracle(const OracleArgs& a) {
  const std::vector<taskgen::Task> tasks = taskgen::ReadTasks(a.tasks);
  std::string family = a.family;
  if (family.empty()) family = tasks.empty() ? "eq" : tasks[0].meta.family;
  const bool sawtooth =
      gp::ParseFamily(family) == gp::KernelFamily::kSawtoothMeta;
  std::ofstream out = OpenOut(a.out);
  std::vector<double> values;
  out << (sawtooth ? "task,floor_nll\n" : "task,oracle_nll,prior_nll\n");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (sawtooth) {
      const double floor = oracle::SawtoothFloorNll(
          a.noise_scale.value_or(tasks[i].meta.noise_scale));
      values.push_back(floor);
      out << i << "," << Num(floor) << "\n";
      continue;
    }
    const gp::KernelSpec spec =
        KernelFor(tasks[i], family, a.lengthscale, a.noise_scale);
    const double nll = oracle::GpOracleNll(spec, tasks[i]);
    values.push_back(nll);
    out << i << "," << Num(nll) << ","
        << Num(oracle::PriorMarginalNll(spec, tasks[i])) << "\n";
  }
  if (!values.empty()) {
    std::cout << "mean_nll " << Num(training::Summarise(values).mean) << "\n";
  }
}

struct LowerBoundArgs {
  double sigma_s = 1.0;
  double lambda = 0.2;
  std::string grid = "-7:0.0625:225";
  std::string family = "eq";
  std::optional<double> lengthscale;
  std::string tasks;
  int samples = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void RunLowerBound(const LowerBoundArgs& a) {
  const grid::GridSpec spec = grid::GridSpec::Parse(a.grid);
  const std::vector<taskgen::Task> tasks = taskgen::ReadTasks(a.tasks);
  if (tasks.empty()) throw DataError(a.tasks + ": no tasks");
  std::ofstream out = OpenOut(a.out);
  out << "task,lower_bound_nll\n";
  std::vector<double> values;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const gp::KernelSpec kernel =
        KernelFor(tasks[i], a.family, a.lengthscale, std::nullopt);
    // Per-task seed keeps rows independent of the task file's length.
    const double nll = oracle::LowerBoundNll(
        kernel, std::span(&tasks[i], 1), a.lambda, a.sigma_s, spec, a.samples,
        a.seed + i);
    values.push_back(nll);
    out << i << "," << Num(nll) << "\n";
  }
  const double mean = training::Summarise(values).mean;
  out << "mean," << Num(mean) << "\n";
  std::cout << "mean_nll " << Num(mean) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Differentially private convolutional neural processes"};
  app.require_subcommand(1);

  AccountArgs account;
  CLI::App* cmd_account =
      app.add_subcommand("account", "mu and noise multipliers for a budget");
  cmd_account->add_option("--eps", account.eps)->required();
  cmd_account->add_option("--delta", account.delta)->required();
  cmd_account->add_option("--sensitivity-sq", account.sensitivity_sq);

  CompareArgs compare;
  CLI::App* cmd_compare = app.add_subcommand(
      "compare-accountants", "classical, RDP and GDP multipliers over eps");
  cmd_compare->add_option("--sensitivity-sq", compare.sensitivity_sq);
  cmd_compare->add_option("--delta", compare.delta);
  cmd_compare->add_option("--eps-min", compare.eps_min);
  cmd_compare->add_option("--eps-max", compare.eps_max);
  cmd_compare->add_option("--steps", compare.steps);
  cmd_compare->add_option("--out", compare.out)->required();

  NoiseArgs noise;
  CLI::App* cmd_noise = app.add_subcommand(
      "sample-grid-noise", "draw an RBF GP sample on a product grid");
  cmd_noise->add_option("--grid", noise.grid, "origin:spacing:count[,...]");
  cmd_noise->add_option("--lengthscale", noise.lengthscale);
  cmd_noise->add_option("--seed", noise.seed)->required();
  cmd_noise->add_option("--out", noise.out)->required();

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen-tasks", "write synthetic tasks");
  std::string gen_config;
  cmd_gen->add_option("--config", gen_config, "JSON file of flag values");
  cmd_gen->add_option("--family", gen.family,
                      "eq, eq-amortised, matern32, sawtooth, "
                      "sawtooth-amortised, sim-to-real");
  cmd_gen->add_option("--lengthscale", gen.lengthscale);
  cmd_gen->add_option("--inverse-period", gen.inverse_period);
  cmd_gen->add_option("--min-context", gen.min_context);
  cmd_gen->add_option("--max-context", gen.max_context);
  cmd_gen->add_option("--targets", gen.targets);
  cmd_gen->add_flag("--eval", gen.evaluation,
                    "draw targets from the context input range");
  cmd_gen->add_option("--count", gen.count);
  cmd_gen->add_option("--seed", gen.seed);
  cmd_gen->add_option("--workers", gen.workers);
  cmd_gen->add_option("--out", gen.out);

  TrainArgs train;
  CLI::App* cmd_train = app.add_subcommand("train", "meta-train a DPConvCNP");
  std::string train_config;
  cmd_train->add_option("--config", train_config, "JSON file of flag values");
  cmd_train->add_option("--tasks-family", train.family);
  cmd_train->add_option("--lengthscale", train.lengthscale);
  cmd_train->add_option("--inverse-period", train.inverse_period);
  cmd_train->add_option("--preset", train.preset, "tiny or full");
  cmd_train->add_option("--depth", train.depth);
  cmd_train->add_option("--width", train.width);
  cmd_train->add_option("--points-per-unit", train.points_per_unit);
  cmd_train->add_option("--ablation", train.ablation, "none or signal-only");
  cmd_train->add_option("--fixed-clip", train.fixed_clip);
  cmd_train->add_option("--fixed-t", train.fixed_t);
  cmd_train->add_option("--steps", train.train.steps);
  cmd_train->add_option("--batch-size", train.train.batch_size);
  cmd_train->add_option("--log-every", train.train.log_every);
  cmd_train->add_option("--train-targets", train.train.train_targets);
  cmd_train->add_option("--validation-tasks", train.validation_tasks);
  cmd_train->add_option("--learning-rate", train.train.learning_rate);
  cmd_train->add_option("--seed", train.train.seed);
  cmd_train->add_option("--workers", train.train.workers);
  cmd_train->add_option("--out", train.out);

  EvalArgs eval;
  CLI::App* cmd_eval =
      app.add_subcommand("eval", "per-task NLL of a trained checkpoint");
  cmd_eval->add_option("--ckpt", eval.ckpt)->required();
  cmd_eval->add_option("--tasks", eval.tasks)->required();
  cmd_eval->add_option("--seed", eval.seed);
  cmd_eval->add_option("--out", eval.out)->required();

  OracleArgs oracle_args;
  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "exact posterior NLL or noise floor");
  cmd_oracle->add_option("--family", oracle_args.family);
  cmd_oracle->add_option("--lengthscale", oracle_args.lengthscale);
  cmd_oracle->add_option("--noise-scale", oracle_args.noise_scale);
  cmd_oracle->add_option("--tasks", oracle_args.tasks)->required();
  cmd_oracle->add_option("--out", oracle_args.out)->required();

  LowerBoundArgs lb;
  CLI::App* cmd_lb = app.add_subcommand(
      "lower-bound", "closed-form NLL floor for signal-only noise");
  cmd_lb->add_option("--sigma-s", lb.sigma_s)->required();
  cmd_lb->add_option("--lambda", lb.lambda)->required();
  cmd_lb->add_option("--grid", lb.grid, "origin:spacing:count");
  cmd_lb->add_option("--family", lb.family);
  cmd_lb->add_option("--lengthscale", lb.lengthscale);
  cmd_lb->add_option("--tasks", lb.tasks)->required();
  cmd_lb->add_option("--samples", lb.samples);
  cmd_lb->add_option("--seed", lb.seed);
  cmd_lb->add_option("--out", lb.out)->required();

  if (argc < 2) {
    std::cerr << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_gen) {
      if (!gen_config.empty()) ApplyJsonConfig(cmd_gen, gen_config);
      RequireOptions(cmd_gen, {"--seed", "--out"});
    }
    if (*cmd_train) {
      if (!train_config.empty()) ApplyJsonConfig(cmd_train, train_config);
      RequireOptions(cmd_train, {"--seed", "--out"});
    }
  } catch (const CLI::Error& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const DomainError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }

  try {
    if (*cmd_account) RunAccount(account);
    if (*cmd_compare) RunCompare(compare);
    if (*cmd_noise) RunSampleNoise(noise);
    if (*cmd_gen) RunGenTasks(gen);
    if (*cmd_train) RunTrain(train);
    if (*cmd_eval) RunEval(eval);
    if (*cmd_oracle) RunOracle(oracle_args);
    if (*cmd_lb) RunLowerBound(lb);
  } catch (const DataError& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const NumericalError& e) {
    spdlog::error("{}", e.what());
    return kExitNumerical;
  } catch (const DomainError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const RefusalError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return 0;
}
