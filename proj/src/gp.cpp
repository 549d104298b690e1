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

#include "circuitbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "circuitbo/errors.hpp"
#include "circuitbo/rng.hpp"

namespace circuitbo::gp {
namespace {

const double kSqrt5 = std::sqrt(5.0);

double matern52_unit(double r, double signal_variance) {
  return signal_variance * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r);
}

double combine(double k_h, double k_x, double mix) {
  return (1.0 - mix) * (k_h + k_x) + mix * (k_h * k_x);
}

// Pairwise pieces of the kernel that do not depend on hyperparameters.
struct PairTerms {
  std::size_t n = 0;
  std::vector<Eigen::MatrixXd> deltas;  // normalized continuous differences per dim
  Eigen::MatrixXd match_fraction;
};

double match_fraction(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InvalidArgument("categorical vectors differ in length");
  if (a.empty()) return 0.0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) matches += a[i] == b[i];
  return static_cast<double>(matches) / static_cast<double>(a.size());
}

double scaled_sq_distance(std::span<const double> deltas, const std::vector<double>& lengthscales) {
  double sum = 0.0;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const double s = deltas[d] / lengthscales[d];
    sum += s * s;
  }
  return sum;
}

double kernel_value(double sq_distance, double fraction, const KernelParams& p) {
  return combine(p.categorical_variance * fraction,
                 matern52_unit(std::sqrt(sq_distance), p.signal_variance), p.mix_weight);
}

PairTerms pair_terms(const MixedSpace& space, const std::vector<MixedInput>& inputs) {
  PairTerms t;
  t.n = inputs.size();
  const std::size_t dims = space.continuous_dims();
  std::vector<std::vector<double>> unit(t.n, std::vector<double>(dims));
  for (std::size_t i = 0; i < t.n; ++i) {
    space.validate(inputs[i]);
    for (std::size_t d = 0; d < dims; ++d) unit[i][d] = space.normalize(d, inputs[i].continuous[d]);
  }
  t.deltas.assign(dims, Eigen::MatrixXd::Zero(t.n, t.n));
  t.match_fraction = Eigen::MatrixXd::Zero(t.n, t.n);
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = 0; j < t.n; ++j) {
      for (std::size_t d = 0; d < dims; ++d) t.deltas[d](i, j) = unit[i][d] - unit[j][d];
      t.match_fraction(i, j) = match_fraction(inputs[i].categorical, inputs[j].categorical);
    }
  }
  return t;
}

Eigen::MatrixXd gram(const PairTerms& t, const KernelParams& p) {
  Eigen::MatrixXd k(t.n, t.n);
  std::vector<double> delta(t.deltas.size());
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t d = 0; d < delta.size(); ++d) delta[d] = t.deltas[d](i, j);
      k(i, j) = k(j, i) =
          kernel_value(scaled_sq_distance(delta, p.lengthscales), t.match_fraction(i, j), p);
    }
  }
  return k;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd alpha;
  double jitter = 0.0;
  double lml = 0.0;
};

// Cholesky of K + (noise + jitter) I, escalating jitter from 1e-8 to 1e-2
// (relative to the signal variance) by factors of ten.
Factorization factorize(Eigen::MatrixXd k, const Eigen::VectorXd& y, const KernelParams& p) {
  Factorization f;
  const auto n = k.rows();
  const Eigen::VectorXd diagonal = k.diagonal();
  for (double rel = 1e-8; rel <= 1e-2 * (1.0 + 1e-9); rel *= 10.0) {
    f.jitter = rel * p.signal_variance;
    k.diagonal() = diagonal.array() + p.noise_variance + f.jitter;
    f.llt.compute(k);
    if (f.llt.info() == Eigen::Success) {
      f.alpha = f.llt.solve(y);
      const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
      f.lml = -0.5 * y.dot(f.alpha) - 0.5 * log_det -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
      if (std::isfinite(f.lml)) return f;
    }
  }
  throw NumericalError("Gram matrix is not positive definite after jitter escalation");
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void MixedSpace::validate(const MixedInput& z) const {
  if (z.categorical.size() != arities.size())
    throw InvalidArgument("categorical dimension mismatch");
  if (z.continuous.size() != lower.size() || upper.size() != lower.size())
    throw InvalidArgument("continuous dimension mismatch");
  for (std::size_t i = 0; i < arities.size(); ++i)
    if (z.categorical[i] < 0 || z.categorical[i] >= arities[i])
      throw InvalidArgument("categorical value " + std::to_string(z.categorical[i]) +
                            " outside arity " + std::to_string(arities[i]));
  for (std::size_t d = 0; d < lower.size(); ++d)
    if (!(z.continuous[d] >= lower[d] && z.continuous[d] <= upper[d]))
      throw InvalidArgument("continuous value outside the box");
}

double MixedSpace::normalize(std::size_t dim, double value) const {
  return (value - lower[dim]) / (upper[dim] - lower[dim]);
}

KernelParams KernelParams::defaults(std::size_t continuous_dims) {
  KernelParams p;
  p.lengthscales.assign(continuous_dims, 0.5);
  return p;
}

void KernelParams::validate(std::size_t continuous_dims) const {
  if (lengthscales.size() != continuous_dims) throw InvalidArgument("lengthscale count mismatch");
  for (double l : lengthscales)
    if (!(l > 0.0)) throw InvalidArgument("lengthscales must be positive");
  if (!(signal_variance > 0.0) || !(categorical_variance > 0.0))
    throw InvalidArgument("kernel variances must be positive");
  if (!(mix_weight >= 0.0 && mix_weight <= 1.0)) throw InvalidArgument("mix weight outside [0, 1]");
  if (!(noise_variance >= 0.0)) throw InvalidArgument("noise variance must be non-negative");
}

double matern52(double distance, double lengthscale, double signal_variance) {
  if (!(distance >= 0.0)) throw InvalidArgument("distance must be non-negative");
  if (!(lengthscale > 0.0) || !(signal_variance > 0.0))
    throw InvalidArgument("lengthscale and signal variance must be positive");
  return matern52_unit(distance / lengthscale, signal_variance);
}

double overlap_kernel(std::span<const int> a, std::span<const int> b,
                      double categorical_variance) {
  return categorical_variance * match_fraction(a, b);
}

double mixed_kernel(const MixedSpace& space, const MixedInput& a, const MixedInput& b,
                    const KernelParams& params) {
  space.validate(a);
  space.validate(b);
  std::vector<double> delta(space.continuous_dims());
  for (std::size_t d = 0; d < delta.size(); ++d)
    delta[d] = space.normalize(d, a.continuous[d]) - space.normalize(d, b.continuous[d]);
  return kernel_value(scaled_sq_distance(delta, params.lengthscales),
                      match_fraction(a.categorical, b.categorical), params);
}

double prior_variance(const KernelParams& params) {
  return combine(params.categorical_variance, params.signal_variance, params.mix_weight);
}

void GpDataset::add(MixedInput input, double target) {
  inputs.push_back(std::move(input));
  targets.push_back(target);
}

GaussianProcess::GaussianProcess(MixedSpace space, KernelParams params, GpDataset data)
    : space_(std::move(space)), params_(std::move(params)), data_(std::move(data)) {
  params_.validate(space_.continuous_dims());
  if (data_.inputs.size() != data_.targets.size())
    throw InvalidArgument("inputs and targets differ in length");
  if (data_.size() == 0) return;
  Factorization f =
      factorize(gram(pair_terms(space_, data_.inputs), params_), as_vector(data_.targets), params_);
  factor_ = std::move(f.llt);
  alpha_ = std::move(f.alpha);
  jitter_ = f.jitter;
  log_marginal_likelihood_ = f.lml;
}

GpPosterior GaussianProcess::predict(const MixedInput& query) const {
  const double prior =
      kernel_value(0.0, space_.categorical_dims() > 0 ? 1.0 : 0.0, params_);
  if (data_.size() == 0) return {0.0, prior};
  space_.validate(query);
  const std::size_t n = data_.size();
  const std::size_t dims = space_.continuous_dims();
  std::vector<double> unit(dims);
  for (std::size_t d = 0; d < dims; ++d) unit[d] = space_.normalize(d, query.continuous[d]);
  Eigen::VectorXd k_star(static_cast<Eigen::Index>(n));
  std::vector<double> delta(dims);
  for (std::size_t i = 0; i < n; ++i) {
    const MixedInput& x = data_.inputs[i];
    for (std::size_t d = 0; d < dims; ++d) delta[d] = space_.normalize(d, x.continuous[d]) - unit[d];
    k_star(static_cast<Eigen::Index>(i)) =
        kernel_value(scaled_sq_distance(delta, params_.lengthscales),
                     match_fraction(x.categorical, query.categorical), params_);
  }
  const Eigen::VectorXd v = factor_.matrixL().solve(k_star);
  return {k_star.dot(alpha_), std::max(0.0, prior - v.squaredNorm())};
}

GpPosterior gp_posterior(const MixedSpace& space, const GpDataset& data,
                         const KernelParams& params, const MixedInput& query) {
  return GaussianProcess(space, params, data).predict(query);
}

double log_marginal_likelihood(const MixedSpace& space, const GpDataset& data,
                               const KernelParams& params) {
  return GaussianProcess(space, params, data).log_marginal_likelihood();
}

namespace {

// Log-parameter vector layout: lengthscales..., signal, categorical, noise.
struct LogBox {
  std::vector<double> lo;
  std::vector<double> hi;

  void clamp(std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
};

LogBox log_box(const HyperparamBounds& b, std::size_t dims) {
  LogBox box;
  for (std::size_t d = 0; d < dims; ++d) {
    box.lo.push_back(std::log(b.lengthscale_min));
    box.hi.push_back(std::log(b.lengthscale_max));
  }
  for (int i = 0; i < 2; ++i) {
    box.lo.push_back(std::log(b.variance_min));
    box.hi.push_back(std::log(b.variance_max));
  }
  box.lo.push_back(std::log(b.noise_min));
  box.hi.push_back(std::log(b.noise_max));
  return box;
}

std::vector<double> to_log(const KernelParams& p) {
  std::vector<double> x;
  for (double l : p.lengthscales) x.push_back(std::log(l));
  x.push_back(std::log(p.signal_variance));
  x.push_back(std::log(p.categorical_variance));
  x.push_back(std::log(std::max(p.noise_variance, 1e-300)));
  return x;
}

KernelParams from_log(const std::vector<double>& x, double mix_weight) {
  KernelParams p;
  const std::size_t dims = x.size() - 3;
  for (std::size_t d = 0; d < dims; ++d) p.lengthscales.push_back(std::exp(x[d]));
  p.signal_variance = std::exp(x[dims]);
  p.categorical_variance = std::exp(x[dims + 1]);
  p.noise_variance = std::exp(x[dims + 2]);
  p.mix_weight = mix_weight;
  return p;
}

class LmlObjective {
 public:
  LmlObjective(const PairTerms& terms, Eigen::VectorXd y, double mix)
      : terms_(terms), y_(std::move(y)), mix_(mix) {}

  double operator()(const std::vector<double>& x) const {
    const KernelParams p = from_log(x, mix_);
    try {
      return factorize(gram(terms_, p), y_, p).lml;
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

 private:
  const PairTerms& terms_;
  Eigen::VectorXd y_;
  double mix_;
};

struct Candidate {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
};

// Bounded Nelder-Mead maximization; candidates are clamped into the box.
Candidate nelder_mead(const LmlObjective& f, const LogBox& box, Candidate start,
                      std::size_t max_evaluations) {
  const std::size_t dim = start.x.size();
  std::vector<Candidate> simplex{start};
  std::size_t evals = 0;
  auto eval = [&](std::vector<double> x) {
    box.clamp(x);
    ++evals;
    const double v = f(x);
    return Candidate{std::move(x), v};
  };
  for (std::size_t i = 0; i < dim && evals < max_evaluations; ++i) {
    std::vector<double> x = start.x;
    x[i] += (x[i] + 0.5 <= box.hi[i]) ? 0.5 : -0.5;
    simplex.push_back(eval(x));
  }
  if (simplex.size() < dim + 1) {
    return *std::max_element(simplex.begin(), simplex.end(),
                             [](const auto& a, const auto& b) { return a.value < b.value; });
  }

  auto by_value = [](const Candidate& a, const Candidate& b) { return a.value > b.value; };
  while (evals < max_evaluations) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i].x[d] / static_cast<double>(dim);
    auto toward = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d) x[d] = centroid[d] + t * (simplex.back().x[d] - centroid[d]);
      return x;
    };
    const Candidate reflected = eval(toward(-1.0));
    if (reflected.value > simplex.front().value) {
      const Candidate expanded = eval(toward(-2.0));
      simplex.back() = expanded.value > reflected.value ? expanded : reflected;
    } else if (reflected.value > simplex[dim - 1].value) {
      simplex.back() = reflected;
    } else {
      const Candidate contracted = eval(toward(0.5));
      if (contracted.value > simplex.back().value) {
        simplex.back() = contracted;
      } else {
        for (std::size_t i = 1; i <= dim && evals < max_evaluations; ++i) {
          std::vector<double> x(dim);
          for (std::size_t d = 0; d < dim; ++d)
            x[d] = simplex[0].x[d] + 0.5 * (simplex[i].x[d] - simplex[0].x[d]);
          simplex[i] = eval(x);
        }
      }
    }
  }
  return *std::min_element(simplex.begin(), simplex.end(), by_value);
}

}  // namespace

FitResult fit_hyperparams(const MixedSpace& space, const GpDataset& data,
                          const HyperparamBounds& bounds, const FitBudget& budget,
                          const KernelParams& initial) {
  if (data.size() < 2) throw InvalidArgument("hyperparameter fitting needs at least 2 points");
  if (data.inputs.size() != data.targets.size())
    throw InvalidArgument("inputs and targets differ in length");
  const std::size_t dims = space.continuous_dims();
  initial.validate(dims);

  const PairTerms terms = pair_terms(space, data.inputs);
  const LmlObjective objective(terms, as_vector(data.targets), initial.mix_weight);
  const LogBox box = log_box(bounds, dims);

  std::vector<std::vector<double>> starts{to_log(initial),
                                          to_log(KernelParams::defaults(dims))};
  Rng rng(budget.seed);
  for (std::size_t s = 0; s < budget.random_starts; ++s) {
    std::vector<double> x(box.lo.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    starts.push_back(std::move(x));
  }

  FitResult result;
  Candidate best;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Candidate start{starts[s], 0.0};
    box.clamp(start.x);
    start.value = objective(start.x);
    if (s == 0) result.initial_log_likelihood = start.value;
    if (s == 1) result.default_log_likelihood = start.value;
    if (start.value > best.value || best.x.empty()) best = start;
    const Candidate local = nelder_mead(objective, box, start, budget.evaluations_per_start);
    if (local.value > best.value) best = local;
  }

  if (!std::isfinite(best.value)) {
    // Every start failed to factorize: fall back to the defaults.
    result.params = KernelParams::defaults(dims);
    result.params.mix_weight = initial.mix_weight;
    result.log_likelihood = best.value;
    return result;
  }
  result.params = from_log(best.x, initial.mix_weight);
  result.log_likelihood = best.value;
  return result;
}

}  // namespace circuitbo::gp
