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

#include "circuitbo/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "circuitbo/errors.hpp"

namespace circuitbo::bandit {
namespace {

constexpr double kRescaleThreshold = 1e6;

}  // namespace

Exp3Agent::Exp3Agent(std::size_t arms, double gamma) : weights_(arms, 1.0), gamma_(gamma) {
  if (arms < 2) throw InvalidArgument("EXP3 needs at least two arms");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must be in (0, 1]");
}

std::vector<double> Exp3Agent::probabilities() const {
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  const double k = static_cast<double>(weights_.size());
  std::vector<double> p(weights_.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = (1.0 - gamma_) * (weights_[i] / total) + gamma_ / k;
  return p;
}

std::size_t Exp3Agent::select(Rng& rng) const { return sample_index(probabilities(), rng); }

void Exp3Agent::update(std::size_t arm, double reward) {
  if (arm >= weights_.size()) throw InvalidArgument("arm index out of range");
  if (!(reward >= 0.0 && reward <= 1.0))
    throw InvalidArgument("EXP3 reward " + std::to_string(reward) + " outside [0, 1]");
  const double p = probabilities()[arm];
  const double k = static_cast<double>(weights_.size());
  weights_[arm] *= std::exp(gamma_ * (reward / p) / k);
  rescale();
}

void Exp3Agent::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) throw InvalidArgument("weight count mismatch");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive and finite");
  weights_ = std::move(weights);
  rescale();
}

// Divides by a power of two so the probabilities are unchanged bit for bit.
void Exp3Agent::rescale() {
  const double top = *std::max_element(weights_.begin(), weights_.end());
  if (top <= kRescaleThreshold) return;
  int exponent = 0;
  std::frexp(top, &exponent);
  for (double& w : weights_) w = std::ldexp(w, -exponent);
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  if (probabilities.empty()) throw InvalidArgument("empty probability vector");
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  return last_positive;  // round-off left the cumulative sum just below u
}

RewardNormalizer RewardNormalizer::from_samples(std::span<const double> samples) {
  if (samples.size() < 2) throw InvalidArgument("normalizer needs at least two samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double sq = 0.0;
  for (double s : samples) sq += (s - mean) * (s - mean);
  const double stddev = std::sqrt(sq / n);
  if (!(stddev > 1e-12 * std::max(1.0, std::abs(mean))))
    throw DegenerateNormalizer(
        "initial observations have zero spread; redraw the initial design with a different seed");
  return {mean, stddev};
}

RewardNormalizer::RewardNormalizer(double mean, double stddev) : mean_(mean), stddev_(stddev) {
  if (!(stddev > 0.0) || !std::isfinite(mean))
    throw InvalidArgument("normalizer needs finite mean and positive standard deviation");
}

double squash_to_unit(double normalized_reward) {
  return std::clamp((normalized_reward + 3.0) / 6.0, 0.0, 1.0);
}

}  // namespace circuitbo::bandit
