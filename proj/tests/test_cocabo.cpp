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

#include <cmath>
#include <vector>

#include "circuitbo/cocabo.hpp"
#include "circuitbo/errors.hpp"
#include "doctest.h"

using namespace circuitbo;
using namespace circuitbo::opt;

namespace {

gp::MixedSpace toy_space() { return {{2, 2, 2}, {-20.0, -20.0}, {20.0, 20.0}}; }

// Dyadic outputs keep sums and shifts exact in floating point.
double toy_objective(const gp::MixedInput& z) {
  double v = 0.0;
  for (int c : z.categorical) v += c;
  const double dx = z.continuous[0] - 7.0;
  const double dy = z.continuous[1] + 3.0;
  v -= (dx * dx + dy * dy) / 100.0;
  return std::round(v * 64.0) / 64.0;
}

OptimizerConfig quick_config(std::uint64_t seed) {
  OptimizerConfig c;
  c.seed = seed;
  c.n_init = 5;
  c.n_iter = 10;
  c.acquisition_samples = 200;
  return c;
}

}  // namespace

TEST_CASE("UCB adds kappa standard deviations") {
  CHECK(ucb({1.0, 0.25}, 2.0) == doctest::Approx(2.0));
  CHECK(ucb({-0.5, 0.0}, 2.0) == doctest::Approx(-0.5));
  CHECK(ucb({0.3, 4.0}, 0.0) == doctest::Approx(0.3));
}

TEST_CASE("box maximizer finds the peak of a quadratic") {
  Rng rng(4);
  const std::vector<double> lo{-20.0, -20.0, -20.0};
  const std::vector<double> hi{20.0, 20.0, 20.0};
  auto f = [](std::span<const double> x) {
    return -((x[0] - 3.0) * (x[0] - 3.0) + (x[1] + 11.0) * (x[1] + 11.0) +
             (x[2] - 19.5) * (x[2] - 19.5));
  };
  const auto best = maximize_in_box(f, lo, hi, 1000, 5, 10.0, 1e-3, rng);
  CHECK(std::abs(best[0] - 3.0) <= 0.5);
  CHECK(std::abs(best[1] + 11.0) <= 0.5);
  CHECK(std::abs(best[2] - 19.5) <= 0.5);
  for (std::size_t d = 0; d < 3; ++d) {
    CHECK(best[d] >= lo[d]);
    CHECK(best[d] <= hi[d]);
  }
}

TEST_CASE("box maximizer respects bounds when the peak is outside") {
  Rng rng(5);
  const std::vector<double> lo{-20.0};
  const std::vector<double> hi{20.0};
  const auto best = maximize_in_box([](std::span<const double> x) { return x[0]; }, lo, hi, 50,
                                    5, 10.0, 1e-3, rng);
  CHECK(best[0] == 20.0);
}

TEST_CASE("run produces n_init + n_iter records with monotone best") {
  const auto out = run(toy_objective, toy_space(), quick_config(1));
  REQUIRE(out.history.size() == 15);
  double best = -1e300;
  for (std::size_t i = 0; i < out.history.size(); ++i) {
    const auto& r = out.history[i];
    CHECK(r.iteration == i);
    best = std::max(best, r.voltage);
    CHECK(r.best_so_far == best);
    CHECK(r.voltage == toy_objective(r.input));
    REQUIRE(r.arm_probabilities.size() == 3);
    for (const auto& p : r.arm_probabilities) CHECK(p.size() == 2);
    for (double x : r.input.continuous) {
      CHECK(x >= -20.0);
      CHECK(x <= 20.0);
    }
  }
  // Initial design records the untouched bandit prior.
  for (std::size_t i = 0; i < 5; ++i)
    for (const auto& p : out.history[i].arm_probabilities) CHECK(p[0] == 0.5);
  CHECK(out.fits.size() == 11);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  const auto a = run(toy_objective, toy_space(), quick_config(9));
  const auto b = run(toy_objective, toy_space(), quick_config(9));
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].input == b.history[i].input);
    CHECK(a.history[i].voltage == b.history[i].voltage);
    CHECK(a.history[i].arm_probabilities == b.history[i].arm_probabilities);
  }
  const auto c = run(toy_objective, toy_space(), quick_config(10));
  bool differs = false;
  for (std::size_t i = 0; i < a.history.size(); ++i) differs |= !(a.history[i].input == c.history[i].input);
  CHECK(differs);
}

TEST_CASE("constant objective is reported as a degenerate normalizer") {
  CHECK_THROWS_AS(run([](const gp::MixedInput&) { return 3.0; }, toy_space(), quick_config(2)),
                  DegenerateNormalizer);
}

TEST_CASE("shifting every voltage leaves the search path unchanged") {
  OptimizerConfig c = quick_config(13);
  c.n_init = 8;
  c.n_iter = 8;
  const auto a = run(toy_objective, toy_space(), c);
  const auto b =
      run([](const gp::MixedInput& z) { return toy_objective(z) + 16.0; }, toy_space(), c);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].input == b.history[i].input);
    CHECK(a.history[i].normalized_reward == b.history[i].normalized_reward);
  }
}

TEST_CASE("observe grows the dataset by one and updates each bandit") {
  CocaboOptimizer opt(toy_space(), quick_config(3));
  std::vector<gp::MixedInput> inputs;
  std::vector<double> volts;
  for (int i = 0; i < 5; ++i) {
    inputs.push_back(opt.random_input());
    volts.push_back(toy_objective(inputs.back()));
  }
  opt.initialize(inputs, volts);
  CHECK(opt.dataset().size() == 5);
  for (const auto& agent : opt.agents())
    for (double w : agent.weights()) CHECK(w == 1.0);
  for (int step = 0; step < 3; ++step) {
    const auto z = opt.suggest();
    const std::size_t before = opt.dataset().size();
    opt.observe(z, toy_objective(z));
    CHECK(opt.dataset().size() == before + 1);
    const double reward = bandit::squash_to_unit(opt.history().back().normalized_reward);
    if (reward > 0.0)
      for (std::size_t i = 0; i < 3; ++i)
        CHECK(opt.agents()[i].weights()[static_cast<std::size_t>(z.categorical[i])] != 1.0);
  }
}

TEST_CASE("fits never fall below the default marginal likelihood") {
  const auto out = run(toy_objective, toy_space(), quick_config(6));
  for (const auto& f : out.fits) CHECK(f.fitted_log_likelihood >= f.default_log_likelihood);
}

TEST_CASE("optimizer rejects misuse and bad configuration") {
  CocaboOptimizer opt(toy_space(), quick_config(1));
  CHECK_THROWS_AS(opt.suggest(), InvalidArgument);
  CHECK_THROWS_AS(opt.observe({{0, 0, 0}, {0.0, 0.0}}, 1.0), InvalidArgument);
  OptimizerConfig bad = quick_config(1);
  bad.n_init = 1;
  CHECK_THROWS_AS(CocaboOptimizer(toy_space(), bad), InvalidArgument);
  bad = quick_config(1);
  bad.kappa = -1.0;
  CHECK_THROWS_AS(CocaboOptimizer(toy_space(), bad), InvalidArgument);
}
