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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace circuitbo::gp {

// One point of the mixed search space: an arm index per categorical
// variable and a real value per continuous variable.
struct MixedInput {
  std::vector<int> categorical;
  std::vector<double> continuous;

  friend bool operator==(const MixedInput&, const MixedInput&) = default;
};

// Declared arities and continuous box. Continuous values are mapped to
// [0, 1] per dimension before any kernel distance is taken.
struct MixedSpace {
  std::vector<int> arities;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t categorical_dims() const { return arities.size(); }
  std::size_t continuous_dims() const { return lower.size(); }

  // Throws InvalidArgument on dimension mismatch or out-of-domain values.
  void validate(const MixedInput& z) const;
  double normalize(std::size_t dim, double value) const;
};

struct KernelParams {
  static constexpr double kMaternNu = 2.5;

  std::vector<double> lengthscales;  // normalized units, one per continuous dim
  double signal_variance = 1.0;
  double categorical_variance = 1.0;
  double mix_weight = 0.5;  // 0: sum of kernels, 1: product
  double noise_variance = 0.01;

  static KernelParams defaults(std::size_t continuous_dims);
  void validate(std::size_t continuous_dims) const;
};

// Matern 5/2 as a function of distance.
// Throws InvalidArgument on negative distance or non-positive parameters.
double matern52(double distance, double lengthscale, double signal_variance);

// Fraction of matching categories times `categorical_variance`.
double overlap_kernel(std::span<const int> a, std::span<const int> b,
                      double categorical_variance);

// (1 - mix) * (k_h + k_x) + mix * k_h * k_x.
double mixed_kernel(const MixedSpace& space, const MixedInput& a, const MixedInput& b,
                    const KernelParams& params);

// k(z, z), identical for every z.
double prior_variance(const KernelParams& params);

struct GpDataset {
  std::vector<MixedInput> inputs;
  std::vector<double> targets;

  std::size_t size() const { return inputs.size(); }
  void add(MixedInput input, double target);
};

struct GpPosterior {
  double mean = 0.0;
  double variance = 0.0;
};

// Zero-mean GP conditioned on a dataset. Factorizes once; predictions are
// cheap. Throws NumericalError if the Gram matrix stays indefinite after
// jitter escalation.
class GaussianProcess {
 public:
  GaussianProcess(MixedSpace space, KernelParams params, GpDataset data);

  GpPosterior predict(const MixedInput& query) const;
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }
  double jitter() const { return jitter_; }

  const MixedSpace& space() const { return space_; }
  const KernelParams& params() const { return params_; }
  const GpDataset& data() const { return data_; }

 private:
  MixedSpace space_;
  KernelParams params_;
  GpDataset data_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double log_marginal_likelihood_ = 0.0;
};

GpPosterior gp_posterior(const MixedSpace& space, const GpDataset& data,
                         const KernelParams& params, const MixedInput& query);

double log_marginal_likelihood(const MixedSpace& space, const GpDataset& data,
                               const KernelParams& params);

struct HyperparamBounds {
  double lengthscale_min = 0.01;
  double lengthscale_max = 10.0;
  double variance_min = 0.01;
  double variance_max = 100.0;
  double noise_min = 1e-6;
  double noise_max = 1.0;
};

// Local searches start from the supplied initial guess, from the defaults,
// and from `random_starts` points drawn log-uniformly inside the bounds.
struct FitBudget {
  std::size_t random_starts = 1;
  std::size_t evaluations_per_start = 150;
  std::uint64_t seed = 0;
};

struct FitResult {
  KernelParams params;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;  // LML of the (clamped) initial guess
  double default_log_likelihood = 0.0;  // LML of the (clamped) defaults
};

// Multi-start Nelder-Mead on log-parameters, maximizing the marginal
// likelihood. mix_weight is held at the initial guess's value. The result is
// never worse than any start point. Requires at least 2 data points.
FitResult fit_hyperparams(const MixedSpace& space, const GpDataset& data,
                          const HyperparamBounds& bounds, const FitBudget& budget,
                          const KernelParams& initial);

}  // namespace circuitbo::gp
