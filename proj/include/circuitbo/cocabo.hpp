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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "circuitbo/bandit.hpp"
#include "circuitbo/gp.hpp"
#include "circuitbo/rng.hpp"

namespace circuitbo::opt {

struct OptimizerConfig {
  std::size_t n_init = 5;
  std::size_t n_iter = 40;
  double kappa = 2.0;
  double gamma = 0.1;
  std::size_t acquisition_samples = 1000;
  std::size_t acquisition_refinements = 5;
  double refine_initial_step = 10.0;  // in continuous-space units (mm)
  double refine_final_step = 1e-3;
  std::uint64_t seed = 0;
  gp::FitBudget fit{};  // seed is derived per refit from `seed`

  // Throws InvalidArgument when a field is outside its domain.
  void validate() const;
};

struct TrialRecord {
  std::size_t iteration = 0;  // 0-based; the first n_init are the initial design
  gp::MixedInput input;
  double voltage = 0.0;
  double normalized_reward = 0.0;
  double best_so_far = 0.0;
  // Arm probabilities of every categorical variable when this input was
  // chosen (uniform-at-random initial points record the bandit's prior).
  std::vector<std::vector<double>> arm_probabilities;
};

// One hyperparameter refit, kept for diagnostics.
struct FitRecord {
  std::size_t dataset_size = 0;
  double default_log_likelihood = 0.0;
  double fitted_log_likelihood = 0.0;
  double jitter = 0.0;
};

double ucb(const gp::GpPosterior& posterior, double kappa);

// Maximizes `f` over the box: `samples` uniform probes, then coordinate
// descent from the best `refinements` probes with step halving from
// `initial_step` down to `final_step`. Ties resolve to the lowest index.
std::vector<double> maximize_in_box(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> lower, std::span<const double> upper,
                                    std::size_t samples, std::size_t refinements,
                                    double initial_step, double final_step, Rng& rng);

// Bandits choose categorical values, GP-UCB chooses the continuous part.
class CocaboOptimizer {
 public:
  CocaboOptimizer(gp::MixedSpace space, OptimizerConfig config);

  // Uniform random point of the mixed space, drawn from the run generator.
  gp::MixedInput random_input();

  // Seeds the GP and the reward normalizer with the initial design. Bandits
  // are not updated. Throws DegenerateNormalizer for zero-spread voltages.
  void initialize(std::span<const gp::MixedInput> inputs, std::span<const double> voltages);

  gp::MixedInput suggest();

  // Appends the observation, updates each bandit on the arm in `input`, and
  // refits hyperparameters.
  void observe(const gp::MixedInput& input, double voltage);

  const std::vector<TrialRecord>& history() const { return history_; }
  const std::vector<FitRecord>& fits() const { return fits_; }
  const gp::GpDataset& dataset() const { return data_; }
  const gp::KernelParams& kernel_params() const { return params_; }
  const std::vector<bandit::Exp3Agent>& agents() const { return agents_; }
  const std::optional<bandit::RewardNormalizer>& normalizer() const { return normalizer_; }
  const gp::MixedSpace& space() const { return space_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  std::vector<std::vector<double>> current_probabilities() const;
  void append(const gp::MixedInput& input, double voltage,
              std::vector<std::vector<double>> probabilities);
  void refit();

  gp::MixedSpace space_;
  OptimizerConfig config_;
  Rng rng_;
  std::vector<bandit::Exp3Agent> agents_;
  std::optional<bandit::RewardNormalizer> normalizer_;
  gp::GpDataset data_;
  gp::KernelParams params_;
  std::optional<gp::GaussianProcess> model_;
  std::vector<TrialRecord> history_;
  std::vector<FitRecord> fits_;
  std::vector<std::vector<double>> pending_probabilities_;
};

using Objective = std::function<double(const gp::MixedInput&)>;

struct RunOutput {
  std::vector<TrialRecord> history;
  std::vector<FitRecord> fits;
};

// Initial design, normalizer, then n_iter suggest/observe rounds.
RunOutput run(const Objective& objective, const gp::MixedSpace& space,
              const OptimizerConfig& config);

}  // namespace circuitbo::opt
