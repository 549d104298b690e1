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
#include <span>
#include <vector>

#include "circuitbo/rng.hpp"

namespace circuitbo::bandit {

// EXP3 over K arms with exploration rate gamma. Rewards fed to update() must
// already be in [0, 1].
class Exp3Agent {
 public:
  Exp3Agent(std::size_t arms, double gamma);

  // p_i = (1 - gamma) * w_i / sum(w) + gamma / K.
  std::vector<double> probabilities() const;

  std::size_t select(Rng& rng) const;

  // w_arm *= exp(gamma * (reward / p_arm) / K), with p_arm taken from the
  // current probabilities. Throws InvalidArgument for rewards outside [0, 1].
  void update(std::size_t arm, double reward);

  std::size_t arms() const { return weights_.size(); }
  double gamma() const { return gamma_; }
  std::span<const double> weights() const { return weights_; }

  // Replaces the weights (all must be positive and finite). Used to restore
  // state and in tests.
  void set_weights(std::vector<double> weights);

 private:
  void rescale();

  std::vector<double> weights_;
  double gamma_;
};

// Samples an index from a probability vector with one uniform draw.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

// Z-scoring against the statistics of the initial observations, using the
// population (divide by n) standard deviation.
class RewardNormalizer {
 public:
  // Throws DegenerateNormalizer when the samples have zero spread and
  // InvalidArgument when fewer than two samples are given.
  static RewardNormalizer from_samples(std::span<const double> samples);

  RewardNormalizer(double mean, double stddev);

  double normalize(double value) const { return (value - mean_) / stddev_; }
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }

 private:
  double mean_;
  double stddev_;
};

// Affine map of the +-3 sigma band onto [0, 1], clamped.
double squash_to_unit(double normalized_reward);

}  // namespace circuitbo::bandit
