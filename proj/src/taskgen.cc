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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "privcnp/errors.h"

namespace privcnp::taskgen {
namespace {

using nlohmann::json;

std::vector<double> UniformInputs(const Range& range, int n, Rng& rng) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (double& x : xs) x = range.Sample(rng);
  return xs;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos
                        ? std::string()
                        : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double ParseCell(const std::string& cell, int line_no) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError("line " + std::to_string(line_no) +
                    ": non-numeric cell '" + cell + "'");
  }
  return v;
}

std::vector<double> DoubleArray(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw DataError(std::string("missing array '") + key + "'");
  }
  std::vector<double> out;
  out.reserve(j.at(key).size());
  for (const json& v : j.at(key)) {
    if (!v.is_number()) {
      throw DataError(std::string("non-numeric entry in '") + key + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

void Range::Validate(const char* what) const {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError(std::string("bad range for ") + what);
  }
}

void IntRange::Validate(const char* what) const {
  if (lo > hi || lo < 0) {
    throw DomainError(std::string("bad range for ") + what);
  }
}

int IntRange::Sample(Rng& rng) const {
  if (lo == hi) return lo;
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

gp::KernelSpec TaskMeta::Kernel() const {
  return gp::KernelSpec{.family = gp::ParseFamily(family),
                        .lengthscale = lengthscale,
                        .signal_scale = signal_scale,
                        .noise_scale = noise_scale};
}

void Task::Validate() const {
  context.Validate();
  if (target_xs.size() != target_ys.size()) {
    throw DomainError("target inputs and outputs differ in length");
  }
  budget.Validate();
}

void GeneratorConfig::Validate() const {
  lengthscale.Validate("lengthscale");
  inverse_period.Validate("inverse period");
  noise_scale.Validate("noise scale");
  context_size.Validate("context size");
  context_inputs.Validate("context inputs");
  target_inputs.Validate("target inputs");
  epsilon.Validate("epsilon");
  if (lengthscale.lo <= 0.0) throw DomainError("lengthscale must be positive");
  if (inverse_period.lo <= 0.0) {
    throw DomainError("inverse period must be positive");
  }
  if (noise_scale.lo < 0.0) throw DomainError("noise scale must be >= 0");
  if (!(signal_scale > 0.0)) throw DomainError("signal scale must be positive");
  if (target_count < 0) throw DomainError("target count must be >= 0");
  if (epsilon.lo < 0.0) throw DomainError("epsilon must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must be in (0, 1)");
}

GeneratorConfig GeneratorConfig::Eq(double lengthscale) {
  GeneratorConfig cfg;
  cfg.lengthscale = Range::Fixed(lengthscale);
  return cfg;
}

GeneratorConfig GeneratorConfig::EqAmortised() {
  GeneratorConfig cfg;
  cfg.lengthscale = Range{0.20, 2.50};
  return cfg;
}

GeneratorConfig GeneratorConfig::Sawtooth(double inverse_period) {
  GeneratorConfig cfg;
  cfg.family = gp::KernelFamily::kSawtoothMeta;
  cfg.inverse_period = Range::Fixed(inverse_period);
  cfg.noise_scale = Range::Fixed(0.05);
  return cfg;
}

GeneratorConfig GeneratorConfig::SawtoothAmortised() {
  GeneratorConfig cfg = Sawtooth(1.0);
  cfg.inverse_period = Range{0.20, 1.25};
  return cfg;
}

GeneratorConfig GeneratorConfig::SimToReal() {
  GeneratorConfig cfg;
  cfg.family = gp::KernelFamily::kMatern32;
  cfg.lengthscale = Range{0.50, 2.00};
  cfg.noise_scale = Range{0.30, 0.80};
  cfg.context_inputs = Range{-1.0, 1.0};
  cfg.target_inputs = Range{-1.0, 1.0};
  return cfg;
}

GeneratorConfig GeneratorConfig::ForEvaluation() const {
  GeneratorConfig cfg = *this;
  cfg.target_inputs = context_inputs;
  return cfg;
}

accounting::PrivacyBudget SampleBudget(const GeneratorConfig& cfg, Rng& rng) {
  return accounting::PrivacyBudget{.epsilon = cfg.epsilon.Sample(rng),
                                   .delta = cfg.delta};
}

Task GenGpTask(const GeneratorConfig& cfg, Rng& rng) {
  cfg.Validate();
  if (cfg.family == gp::KernelFamily::kSawtoothMeta) {
    throw DomainError("GenGpTask needs a GP family");
  }
  Task task;
  task.meta.family = gp::FamilyName(cfg.family);
  task.meta.lengthscale = cfg.lengthscale.Sample(rng);
  task.meta.signal_scale = cfg.signal_scale;
  task.meta.noise_scale = cfg.noise_scale.Sample(rng);

  const int n = cfg.context_size.Sample(rng);
  task.context.xs = UniformInputs(cfg.context_inputs, n, rng);
  task.target_xs = UniformInputs(cfg.target_inputs, cfg.target_count, rng);

  std::vector<double> all = task.context.xs;
  all.insert(all.end(), task.target_xs.begin(), task.target_xs.end());
  const std::vector<double> ys = gp::GpSample(task.meta.Kernel(), all, rng);
  task.context.ys.assign(ys.begin(), ys.begin() + n);
  task.target_ys.assign(ys.begin() + n, ys.end());
  task.budget = SampleBudget(cfg, rng);
  return task;
}

double SawtoothSignal(double x, double period, int direction, double phase) {
  double f = 0.0;
  for (int m = 1; m <= 2; ++m) {
    f += std::sin(2.0 * m * std::numbers::pi * (direction * x / period) +
                  phase) /
         m;
  }
  return 2.0 / std::numbers::pi * f;
}

Task GenSawtoothTask(const GeneratorConfig& cfg, Rng& rng) {
  cfg.Validate();
  Task task;
  task.meta.family = gp::FamilyName(gp::KernelFamily::kSawtoothMeta);
  task.meta.period = 1.0 / cfg.inverse_period.Sample(rng);
  task.meta.signal_scale = cfg.signal_scale;
  task.meta.noise_scale = cfg.noise_scale.Sample(rng);
  task.meta.direction =
      std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  task.meta.phase = Uniform(rng, 0.0, 2.0 * std::numbers::pi);

  const int n = cfg.context_size.Sample(rng);
  task.context.xs = UniformInputs(cfg.context_inputs, n, rng);
  task.target_xs = UniformInputs(cfg.target_inputs, cfg.target_count, rng);
  auto observe = [&](double x) {
    return SawtoothSignal(x, task.meta.period, task.meta.direction,
                          task.meta.phase) +
           task.meta.noise_scale * StandardNormal(rng);
  };
  task.context.ys.reserve(task.context.xs.size());
  for (double x : task.context.xs) task.context.ys.push_back(observe(x));
  task.target_ys.reserve(task.target_xs.size());
  for (double x : task.target_xs) task.target_ys.push_back(observe(x));
  task.budget = SampleBudget(cfg, rng);
  return task;
}

Task GenTask(const GeneratorConfig& cfg, Rng& rng) {
  if (cfg.family == gp::KernelFamily::kSawtoothMeta) {
    return GenSawtoothTask(cfg, rng);
  }
  return GenGpTask(cfg, rng);
}

PointSet LoadRealDataset(const std::filesystem::path& path,
                         const std::string& input_column,
                         const std::string& output_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + " is empty");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::vector<std::string> header = SplitCsvLine(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ix = column(input_column);
  const std::size_t iy = column(output_column);

  PointSet points;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() <= std::max(ix, iy)) {
      throw DataError("line " + std::to_string(line_no) + ": too few cells");
    }
    points.xs.push_back(ParseCell(cells[ix], line_no));
    points.ys.push_back(ParseCell(cells[iy], line_no));
  }
  if (points.xs.size() < 2) throw DataError("need at least two data rows");

  Normalisation& norm = points.norm;
  const auto [xmin, xmax] = std::minmax_element(points.xs.begin(), points.xs.end());
  norm.x_min = *xmin;
  norm.x_max = *xmax;
  if (!(norm.x_max > norm.x_min)) throw DataError("input column is constant");
  const double n = static_cast<double>(points.ys.size());
  norm.y_mean = std::accumulate(points.ys.begin(), points.ys.end(), 0.0) / n;
  double ss = 0.0;
  for (double y : points.ys) ss += (y - norm.y_mean) * (y - norm.y_mean);
  norm.y_std = std::sqrt(ss / n);
  if (!(norm.y_std > 0.0)) {
    throw DataError("output column has zero variance");
  }
  for (double& x : points.xs) x = norm.NormaliseX(x);
  for (double& y : points.ys) y = norm.NormaliseY(y);
  return points;
}

Task SplitRealTask(const PointSet& points, int n, Rng& rng,
                   const accounting::PrivacyBudget& budget) {
  const auto total = static_cast<int>(points.xs.size());
  if (n < 0 || n >= total) {
    throw DomainError("context size must be below the number of points");
  }
  budget.Validate();
  std::vector<std::size_t> order(points.xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> in_context(order.size(), false);
  for (int i = 0; i < n; ++i) in_context[order[i]] = true;

  Task task;
  task.budget = budget;
  task.meta.family = "real";
  for (int i = 0; i < n; ++i) {
    task.context.xs.push_back(points.xs[order[i]]);
    task.context.ys.push_back(points.ys[order[i]]);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (in_context[i]) continue;
    task.target_xs.push_back(points.xs[i]);
    task.target_ys.push_back(points.ys[i]);
  }
  return task;
}

std::string TaskToJson(const Task& task) {
  json meta = {{"family", task.meta.family},
               {"signal_scale", task.meta.signal_scale},
               {"noise_scale", task.meta.noise_scale}};
  if (task.meta.family == "sawtooth") {
    meta["period"] = task.meta.period;
    meta["direction"] = task.meta.direction;
    meta["phase"] = task.meta.phase;
  } else {
    meta["lengthscale"] = task.meta.lengthscale;
  }
  const json j = {{"cx", task.context.xs},  {"cy", task.context.ys},
                  {"tx", task.target_xs},   {"ty", task.target_ys},
                  {"eps", task.budget.epsilon},
                  {"delta", task.budget.delta}, {"meta", meta}};
  return j.dump();
}

Task TaskFromJson(const std::string& line) {
  const json j = json::parse(line);
  if (!j.is_object()) throw DataError("task is not a JSON object");
  Task task;
  task.context.xs = DoubleArray(j, "cx");
  task.context.ys = DoubleArray(j, "cy");
  task.target_xs = DoubleArray(j, "tx");
  task.target_ys = DoubleArray(j, "ty");
  task.budget.epsilon = j.at("eps").get<double>();
  task.budget.delta = j.at("delta").get<double>();
  if (j.contains("meta")) {
    const json& m = j.at("meta");
    task.meta.family = m.value("family", std::string());
    task.meta.lengthscale = m.value("lengthscale", 0.0);
    task.meta.period = m.value("period", 0.0);
    task.meta.signal_scale = m.value("signal_scale", 0.0);
    task.meta.noise_scale = m.value("noise_scale", 0.0);
    task.meta.direction = m.value("direction", 0);
    task.meta.phase = m.value("phase", 0.0);
  }
  task.Validate();
  return task;
}

void WriteTasks(const std::filesystem::path& path,
                std::span<const Task> tasks) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const Task& task : tasks) out << TaskToJson(task) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<Task> ReadTasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Task> tasks;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      tasks.push_back(TaskFromJson(line));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return tasks;
}

}  // namespace privcnp::taskgen
