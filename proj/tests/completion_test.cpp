// Copyright 2026 The eigloc Authors. All Rights Reserved.
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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eigloc/completion.hpp"
#include "oracles.hpp"

namespace eigloc {
namespace {

// Observes the listed entries of `truth` (duplicates collapse).
ObservationMatrix observe(const Eigen::MatrixXd& truth,
                          const std::vector<std::pair<std::size_t, std::size_t>>& entries) {
  ObservationMatrix obs(GridSpec(static_cast<std::size_t>(truth.rows()), 1.0));
  for (const auto& [i, j] : entries) {
    const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
    if (obs.mask(a, b)) continue;
    obs.mask(a, b) = true;
    obs.values(a, b) = truth(a, b);
    obs.omega.emplace_back(i, j);
  }
  return obs;
}

ObservationMatrix observe_fraction(const Eigen::MatrixXd& truth, double fraction, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (rng.uniform() < fraction) {
        entries.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  return observe(truth, entries);
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

double nuclear_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

CompletionConfig exact_config() {
  CompletionConfig cfg;
  cfg.epsilon = 0.0;
  cfg.epsilon_mode = EpsilonMode::kExplicit;
  cfg.max_iters = 3000;
  return cfg;
}

TEST(CompletionConfig, Validation) {
  CompletionConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lambda_decay = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.epsilon = -1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Complete, FullyObservedIsReturned) {
  Rng rng(1);
  const Eigen::MatrixXd h = random_vector(rng, 12, 0.0, 1.0) * random_vector(rng, 12, 0.0, 1.0).transpose() +
                            0.3 * random_vector(rng, 12, -1.0, 1.0) * random_vector(rng, 12, -1.0, 1.0).transpose();
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) all.emplace_back(i, j);
  }
  const auto out = complete(observe(h, all), exact_config());
  EXPECT_LT((out.values - h).norm() / h.norm(), 1e-6);
  // Feeding the result back is a fixed point.
  const auto again = complete(observe(out.values, all), exact_config());
  EXPECT_LT((again.values - out.values).norm() / out.values.norm(), 1e-6);
}

TEST(Complete, RecoversRankOneFromSixtyPercent) {
  Rng rng(20);
  const Eigen::MatrixXd h = random_vector(rng, 20, 0.5, 1.5) * random_vector(rng, 20, 0.5, 1.5).transpose();
  const auto obs = observe_fraction(h, 0.6, rng);
  const auto out = complete(obs, exact_config());
  EXPECT_LT((out.values - h).norm() / h.norm(), 1e-3);
}

TEST(Complete, ScalesWithPositiveFactor) {
  Rng rng(3);
  const Eigen::MatrixXd h = random_vector(rng, 16, 0.0, 1.0) * random_vector(rng, 16, 0.0, 1.0).transpose();
  const auto obs = observe_fraction(h, 0.5, rng);
  CompletionConfig cfg;
  const auto base = complete(obs, cfg);
  for (double c : {0.25, 3.0, 1e3}) {
    auto scaled = obs;
    scaled.values *= c;
    const auto out = complete(scaled, cfg);
    EXPECT_LT((out.values - c * base.values).norm(), 1e-9 * c * base.values.norm()) << c;
  }
}

TEST(Complete, FeasibleAndNoLargerNuclearNormThanTruth) {
  Rng rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd h = random_vector(rng, 18, 0.0, 1.0) * random_vector(rng, 18, 0.0, 1.0).transpose() +
                              random_vector(rng, 18, 0.0, 0.5) * random_vector(rng, 18, 0.0, 0.5).transpose();
    const auto obs = observe_fraction(h, 0.5, rng);
    CompletionConfig cfg;
    cfg.max_iters = 2000;
    const auto out = complete(obs, cfg);
    if (out.converged) {
      EXPECT_LE(out.residual, out.tolerance * (1.0 + 1e-12));
    }
    EXPECT_LE(out.residual, out.tolerance * (1.0 + 1e-6));
    // The truth is feasible (zero residual), so the minimizer cannot have a
    // larger nuclear norm; allow a small optimality gap for the iterative solver.
    EXPECT_LE(nuclear_norm(out.values), nuclear_norm(h) * (1.0 + 1e-3));
  }
}

TEST(Complete, ErrorsAndWarnings) {
  ObservationMatrix empty(GridSpec(4, 1.0));
  try {
    complete(empty, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyObservation);
  }
  const Eigen::MatrixXd h = Eigen::MatrixXd::Constant(4, 4, 1.0);
  const auto out = complete(observe(h, {{0, 0}, {1, 1}}), {});
  EXPECT_FALSE(out.warnings.empty());

  const auto zeros = complete(observe(Eigen::MatrixXd::Zero(4, 4), {{0, 0}, {2, 3}}), {});
  EXPECT_EQ(zeros.values.norm(), 0.0);
  EXPECT_TRUE(zeros.converged);
}

TEST(Complete, EpsilonModes) {
  const Eigen::MatrixXd h = Eigen::MatrixXd::Constant(3, 3, 2.0);
  const auto obs = observe(h, {{0, 0}, {1, 2}});
  CompletionConfig cfg;
  cfg.epsilon = 0.1;
  EXPECT_NEAR(resolve_epsilon(obs, cfg), 0.1 * std::sqrt(8.0), 1e-15);
  cfg.epsilon_mode = EpsilonMode::kExplicit;
  EXPECT_EQ(resolve_epsilon(obs, cfg), 0.1);
}

TEST(Complete, RankOneIncoherentRecovery) {
  const std::size_t n = 30;
  const auto m = static_cast<std::size_t>(
      std::ceil(3.0 * n * std::log(double(n)) * std::log(double(n))));
  std::vector<double> errors;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(777, seed));
    Eigen::VectorXd u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      u(static_cast<Eigen::Index>(i)) = (rng.uniform() < 0.5 ? -1.0 : 1.0) / std::sqrt(double(n));
      v(static_cast<Eigen::Index>(i)) = (rng.uniform() < 0.5 ? -1.0 : 1.0) / std::sqrt(double(n));
    }
    const Eigen::MatrixXd h = u * v.transpose();
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (std::size_t k = 0; k < m; ++k) {
      entries.emplace_back(static_cast<std::size_t>(rng.uniform() * n),
                           static_cast<std::size_t>(rng.uniform() * n));
    }
    const auto out = complete(observe(h, entries), exact_config());
    errors.push_back((out.values - h).norm() / h.norm());
  }
  EXPECT_LT(testing::median(errors), 1e-2);
}

TEST(ErrorBounds, SamplingBound) {
  const auto g = CharacteristicModel::gaussian(20.0);
  const double u0 = std::pow(40.0 / std::numbers::pi, 0.25);
  const auto ku = testing::dense_argmax(
      [&](double x) { return 40.0 * x * g(x); }, 0.0, 1.0, 1e-6);  // |u'| = 2 g x u
  const double expected = std::sqrt(200.0) * u0 * ku.value * 8.0 / 9261.0;
  EXPECT_NEAR(sampling_error_bound(g, 1.0, 2.0, 21, 200), expected, 1e-9 * expected);
  EXPECT_NEAR(sampling_error_bound(g, 1.0, 2.0, 42, 200),
              sampling_error_bound(g, 1.0, 2.0, 21, 200) / 8.0, 1e-15);
  EXPECT_EQ(sampling_error_bound(g, 1.0, 2.0, 21, 0), 0.0);
}

TEST(ErrorBounds, CompletionBound) {
  EXPECT_EQ(completion_error_bound(0.0, 20, 100), 0.0);
  const std::size_t n = 20;
  const double eps = 0.01;
  EXPECT_NEAR(completion_error_bound(eps, n, 2 * n * n), 4.0 * std::sqrt(2.0 * n) * eps + 2.0 * eps,
              1e-15);
  EXPECT_THROW(completion_error_bound(eps, n, 0), Error);
  for (std::size_t nc : {50u, 80u, 150u, 300u}) {
    const double l = std::log(double(nc));
    const auto m = static_cast<std::size_t>(std::round(nc * l * l));
    const double exact = completion_error_bound(1.0, nc, m);
    const double simple = completion_error_bound_asymptotic(1.0, nc, 1.0);
    EXPECT_LT(std::abs(exact - simple) / exact, 0.2) << nc;
  }
}

TEST(MatrixCsv, RowMajor) {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  std::ostringstream out;
  write_matrix_csv(out, m);
  EXPECT_EQ(out.str(), "1,2,3\n4,5,6.5\n");
}

}  // namespace
}  // namespace eigloc
