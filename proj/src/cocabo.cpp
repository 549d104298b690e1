// Copyright 2026 The circuitbo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "circuitbo/cocabo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "circuitbo/errors.hpp"

namespace circuitbo::opt {
namespace {

// Refit only once the dataset is large enough to say anything about the
// hyperparameters; before that the defaults are used.
constexpr std::size_t kMinPointsForRefit = 5;
constexpr std::size_t kMaxRefineEvaluations = 20000;

struct Scored {
  std::vector<double> x;
  double value;
};

Scored coordinate_ascent(const std::function<double(std::span<const double>)>& f, Scored start,
                         std::span<const double> lower, std::span<const double> upper,
                         double initial_step, double final_step) {
  std::size_t evaluations = 0;
  for (double step = initial_step; step >= final_step && evaluations < kMaxRefineEvaluations;) {
    bool improved = false;
    for (std::size_t d = 0; d < start.x.size(); ++d) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> candidate = start.x;
        candidate[d] = std::clamp(candidate[d] + sign * step, lower[d], upper[d]);
        if (candidate[d] == start.x[d]) continue;
        const double value = f(candidate);
        ++evaluations;
        if (value > start.value) {
          start = {std::move(candidate), value};
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return start;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (n_init < 2) throw InvalidArgument("n_init must be at least 2");
  if (n_iter < 1) throw InvalidArgument("n_iter must be at least 1");
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must be in (0, 1]");
  if (acquisition_samples < 1) throw InvalidArgument("acquisition_samples must be at least 1");
  if (!(refine_final_step > 0.0) || !(refine_initial_step >= refine_final_step))
    throw InvalidArgument("refinement steps must satisfy 0 < final <= initial");
}

double ucb(const gp::GpPosterior& posterior, double kappa) {
  return posterior.mean + kappa * std::sqrt(std::max(0.0, posterior.variance));
}

std::vector<double> maximize_in_box(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> lower, std::span<const double> upper,
                                    std::size_t samples, std::size_t refinements,
                                    double initial_step, double final_step, Rng& rng) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in dimension");
  if (samples == 0) throw InvalidArgument("need at least one acquisition probe");

  std::vector<std::vector<double>> probes(samples, std::vector<double>(lower.size()));
  for (auto& p : probes)
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = rng.uniform(lower[d], upper[d]);

  std::vector<double> values(samples);
  for (std::size_t i = 0; i < samples; ++i) values[i] = f(probes[i]);

  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  Scored best{probes[order[0]], values[order[0]]};
  const std::size_t starts = std::min(refinements, samples);
  for (std::size_t r = 0; r < starts; ++r) {
    const std::size_t i = order[r];
    Scored refined =
        coordinate_ascent(f, {probes[i], values[i]}, lower, upper, initial_step, final_step);
    if (refined.value > best.value) best = std::move(refined);
  }
  return best.x;
}

CocaboOptimizer::CocaboOptimizer(gp::MixedSpace space, OptimizerConfig config)
    : space_(std::move(space)), config_(config), rng_(config.seed) {
  config_.validate();
  if (space_.lower.size() != space_.upper.size())
    throw InvalidArgument("box bounds differ in dimension");
  for (std::size_t d = 0; d < space_.lower.size(); ++d)
    if (!(space_.lower[d] < space_.upper[d])) throw InvalidArgument("empty continuous box");
  for (int arity : space_.arities)
    agents_.emplace_back(static_cast<std::size_t>(arity), config_.gamma);
  params_ = gp::KernelParams::defaults(space_.continuous_dims());
}

gp::MixedInput CocaboOptimizer::random_input() {
  gp::MixedInput z;
  for (int arity : space_.arities)
    z.categorical.push_back(static_cast<int>(rng_.index(static_cast<std::size_t>(arity))));
  for (std::size_t d = 0; d < space_.continuous_dims(); ++d)
    z.continuous.push_back(rng_.uniform(space_.lower[d], space_.upper[d]));
  return z;
}

std::vector<std::vector<double>> CocaboOptimizer::current_probabilities() const {
  std::vector<std::vector<double>> out;
  for (const auto& agent : agents_) out.push_back(agent.probabilities());
  return out;
}

void CocaboOptimizer::initialize(std::span<const gp::MixedInput> inputs,
                                 std::span<const double> voltages) {
  if (normalizer_) throw InvalidArgument("optimizer already initialized");
  if (inputs.size() != voltages.size()) throw InvalidArgument("inputs and voltages differ in length");
  for (const auto& z : inputs) space_.validate(z);
  normalizer_ = bandit::RewardNormalizer::from_samples(voltages);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    append(inputs[i], voltages[i], current_probabilities());
  refit();
}

void CocaboOptimizer::append(const gp::MixedInput& input, double voltage,
                             std::vector<std::vector<double>> probabilities) {
  TrialRecord record;
  record.iteration = history_.size();
  record.input = input;
  record.voltage = voltage;
  record.normalized_reward = normalizer_->normalize(voltage);
  record.best_so_far = history_.empty() ? voltage : std::max(history_.back().best_so_far, voltage);
  record.arm_probabilities = std::move(probabilities);
  data_.add(input, record.normalized_reward);
  history_.push_back(std::move(record));
}

void CocaboOptimizer::refit() {
  if (data_.size() >= kMinPointsForRefit) {
    gp::FitBudget budget = config_.fit;
    budget.seed = mix_seed(config_.seed, data_.size());
    const gp::FitResult fit = gp::fit_hyperparams(space_, data_, {}, budget, params_);
    params_ = fit.params;
    model_.emplace(space_, params_, data_);
    fits_.push_back({data_.size(), fit.default_log_likelihood, model_->log_marginal_likelihood(),
                     model_->jitter()});
  } else {
    params_ = gp::KernelParams::defaults(space_.continuous_dims());
    model_.emplace(space_, params_, data_);
  }
}

gp::MixedInput CocaboOptimizer::suggest() {
  if (!model_) throw InvalidArgument("suggest() called before initialize()");
  pending_probabilities_ = current_probabilities();
  gp::MixedInput z;
  for (const auto& p : pending_probabilities_)
    z.categorical.push_back(static_cast<int>(bandit::sample_index(p, rng_)));

  const gp::GaussianProcess& model = *model_;
  const double kappa = config_.kappa;
  auto acquisition = [&](std::span<const double> x) {
    gp::MixedInput q{z.categorical, {x.begin(), x.end()}};
    return ucb(model.predict(q), kappa);
  };
  z.continuous = maximize_in_box(acquisition, space_.lower, space_.upper,
                                 config_.acquisition_samples, config_.acquisition_refinements,
                                 config_.refine_initial_step, config_.refine_final_step, rng_);
  return z;
}

void CocaboOptimizer::observe(const gp::MixedInput& input, double voltage) {
  if (!normalizer_) throw InvalidArgument("observe() called before initialize()");
  space_.validate(input);
  auto probabilities =
      pending_probabilities_.empty() ? current_probabilities() : std::move(pending_probabilities_);
  pending_probabilities_.clear();
  append(input, voltage, std::move(probabilities));
  const double reward = bandit::squash_to_unit(history_.back().normalized_reward);
  for (std::size_t i = 0; i < agents_.size(); ++i)
    agents_[i].update(static_cast<std::size_t>(input.categorical[i]), reward);
  refit();
}

RunOutput run(const Objective& objective, const gp::MixedSpace& space,
              const OptimizerConfig& config) {
  CocaboOptimizer optimizer(space, config);
  std::vector<gp::MixedInput> inputs;
  std::vector<double> voltages;
  for (std::size_t i = 0; i < config.n_init; ++i) {
    inputs.push_back(optimizer.random_input());
    voltages.push_back(objective(inputs.back()));
  }
  optimizer.initialize(inputs, voltages);
  for (std::size_t i = 0; i < config.n_iter; ++i) {
    const gp::MixedInput z = optimizer.suggest();
    optimizer.observe(z, objective(z));
  }
  return {optimizer.history(), optimizer.fits()};
}

}  // namespace circuitbo::opt
