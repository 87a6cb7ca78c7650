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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "eigloc/error.hpp"
#include "eigloc/field_model.hpp"
#include "eigloc/linalg.hpp"
#include "eigloc/rng.hpp"
#include "eigloc/sampling.hpp"

namespace eigloc {

enum class EpsilonMode {
  kExplicit,           // epsilon is the Frobenius tolerance itself
  kFractionOfObserved, // tolerance = epsilon * ||P_Omega(H_hat)||_F
  kTheoreticalBound,   // epsilon holds the sampling-error bound, used as is
};

struct CompletionConfig {
  double epsilon = 1e-3;
  EpsilonMode epsilon_mode = EpsilonMode::kFractionOfObserved;
  std::size_t max_iters = 500;
  double rel_tol = 1e-6;
  double lambda_decay = 0.9;

  void validate() const {
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
    if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rel_tol must be > 0");
    if (!(lambda_decay > 0.0 && lambda_decay < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "lambda_decay must be in (0, 1)");
    }
  }
};

struct CompletedMatrix {
  Eigen::MatrixXd values;
  std::size_t iterations_used = 0;
  double residual = 0.0;   // ||P_Omega(X - H_hat)||_F
  double tolerance = 0.0;  // resolved epsilon
  double threshold = 0.0;  // final singular-value threshold
  bool converged = false;
  std::vector<std::string> warnings;
};

inline double observed_norm(const ObservationMatrix& obs) {
  double s = 0.0;
  for (const auto& [i, j] : obs.omega) {
    const double v = obs.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    s += v * v;
  }
  return std::sqrt(s);
}

inline double resolve_epsilon(const ObservationMatrix& obs, const CompletionConfig& cfg) {
  switch (cfg.epsilon_mode) {
    case EpsilonMode::kFractionOfObserved:
      return cfg.epsilon * observed_norm(obs);
    case EpsilonMode::kExplicit:
    case EpsilonMode::kTheoreticalBound:
      return cfg.epsilon;
  }
  return cfg.epsilon;
}

namespace detail {

struct Shrunk {
  Eigen::MatrixXd matrix;
  double nuclear_norm = 0.0;
  Eigen::Index rank = 0;
};

// Singular-value soft-thresholding U max(S - lambda, 0) V^T.
//
// Iterates of the completion solver are low rank and change slowly, so the
// leading singular subspace is tracked across calls: each call runs one
// block power step on the previous right subspace (plus a margin of extra
// directions) and only falls back to a dense SVD when the retained rank
// approaches half the dimension.
class SoftThresholder {
 public:
  Shrunk apply(const Eigen::MatrixXd& g, double lambda) {
    const Eigen::Index dim = std::min(g.rows(), g.cols());
    if (basis_.rows() != g.cols()) basis_.resize(g.cols(), 0);
    if (basis_.cols() == 0) grow(std::min<Eigen::Index>(dim, kMinBasis));
    while (true) {
      const Eigen::Index k = basis_.cols();
      if (2 * k >= dim) return dense(g, lambda);
      const Eigen::MatrixXd p = orthonormal(g.transpose() * orthonormal(g * basis_));
      const Eigen::MatrixXd q = orthonormal(g * p);
      const Eigen::MatrixXd b = q.transpose() * g;
      const ThinSvd svd = thin_svd(b.transpose());
      const auto& s = svd.values;
      Eigen::Index r = 0;
      while (r < s.size() && s(r) > lambda) ++r;
      if (r + kMargin / 2 > k) {
        grow(std::min(dim, 2 * k));
        continue;
      }
      // b^T = W S Z^T  =>  g ~ q b = (q Z) S W^T
      const Eigen::MatrixXd& right = svd.left;
      Shrunk out = assemble(q * svd.right, s, right, r, lambda, g.rows(), g.cols());
      const Eigen::Index keep = std::min(k, std::max(r + kMargin, kMinBasis));
      basis_ = right.leftCols(keep);
      return out;
    }
  }

 private:
  static constexpr Eigen::Index kMinBasis = 8;
  static constexpr Eigen::Index kMargin = 6;

  static Eigen::MatrixXd orthonormal(const Eigen::MatrixXd& a) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  }

  static Shrunk assemble(const Eigen::MatrixXd& left, const Eigen::VectorXd& s,
                         const Eigen::MatrixXd& right, Eigen::Index r, double lambda,
                         Eigen::Index rows, Eigen::Index cols) {
    Shrunk out;
    out.rank = r;
    if (r == 0) {
      out.matrix = Eigen::MatrixXd::Zero(rows, cols);
      return out;
    }
    const Eigen::VectorXd shrunk = s.head(r).array() - lambda;
    out.nuclear_norm = shrunk.sum();
    out.matrix = left.leftCols(r) * shrunk.asDiagonal() * right.leftCols(r).transpose();
    return out;
  }

  Shrunk dense(const Eigen::MatrixXd& g, double lambda) {
    const ThinSvd svd = thin_svd(g);
    const auto& s = svd.values;
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > lambda) ++r;
    const Eigen::Index keep = std::min(s.size(), std::max(r + kMargin, kMinBasis));
    basis_ = svd.right.leftCols(keep);
    return assemble(svd.left, s, svd.right, r, lambda, g.rows(), g.cols());
  }

  // Appends fixed pseudo-random directions until the basis has k columns.
  void grow(Eigen::Index k) {
    const Eigen::Index old = basis_.cols();
    if (k <= old) return;
    basis_.conservativeResize(Eigen::NoChange, k);
    for (Eigen::Index c = old; c < k; ++c) {
      for (Eigen::Index i = 0; i < basis_.rows(); ++i) basis_(i, c) = fill_.uniform(-1.0, 1.0);
    }
  }

  Eigen::MatrixXd basis_;
  Rng fill_{0x5eed5eedULL};
};

inline double observed_residual(const Eigen::MatrixXd& x, const ObservationMatrix& obs) {
  double s = 0.0;
  for (const auto& [i, j] : obs.omega) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    const double d = x(a, b) - obs.values(a, b);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// Nuclear-norm matrix completion
///
///   minimize ||X||_*  subject to  ||P_Omega(X - H_hat)||_F <= epsilon
///
/// solved in Lagrangian form by accelerated proximal gradient steps
/// (singular-value soft-thresholding). The threshold starts at the top
/// singular value of P_Omega(H_hat) and shrinks by `lambda_decay` after every
/// step whose residual still exceeds epsilon; it is held once the constraint
/// is met. Iteration stops when the relative Frobenius change of the iterate
/// falls below `rel_tol` with the constraint met (or the threshold at its
/// floor), or after `max_iters` steps. A non-converged run returns the best
/// iterate seen.
inline CompletedMatrix complete(const ObservationMatrix& obs, const CompletionConfig& cfg) {
  cfg.validate();
  if (obs.omega.empty()) {
    throw Error(ErrorCode::kEmptyObservation, "completion needs at least one observed entry");
  }
  const Eigen::Index n = obs.values.rows();
  const Eigen::Index m = obs.values.cols();
  const double eps = resolve_epsilon(obs, cfg);

  CompletedMatrix out;
  out.tolerance = eps;
  const auto row_seen = obs.mask.rowwise().any();
  const auto col_seen = obs.mask.colwise().any();
  if (!row_seen.all() || !col_seen.all()) {
    out.warnings.emplace_back(
        "observation has empty rows or columns; their completion is unidentifiable");
  }

  Eigen::MatrixXd observed = Eigen::MatrixXd::Zero(n, m);
  for (const auto& [i, j] : obs.omega) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    observed(a, b) = obs.values(a, b);
  }

  const double top = singular_values(observed)(0);
  if (!(top > 0.0)) {
    // All observations are zero: X = 0 is feasible with zero nuclear norm.
    out.values = Eigen::MatrixXd::Zero(n, m);
    out.converged = true;
    return out;
  }
  const double floor = 1e-10 * top;
  double lambda = cfg.lambda_decay * top;

  detail::SoftThresholder thresholder;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd x_prev = x;
  double t = 1.0;

  Eigen::MatrixXd best = x;
  double best_res = detail::observed_residual(x, obs);
  double best_nuc = 0.0;
  bool best_feasible = best_res <= eps;

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Eigen::MatrixXd g = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    for (const auto& [i, j] : obs.omega) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      g(a, b) = observed(a, b);
    }
    auto shrunk = thresholder.apply(g, lambda);
    const double res = detail::observed_residual(shrunk.matrix, obs);
    const double scale = std::max(x.norm(), std::numeric_limits<double>::min());
    const double change = (shrunk.matrix - x).norm() / scale;
    x_prev = std::move(x);
    x = std::move(shrunk.matrix);
    out.iterations_used = it;

    const bool feasible = res <= eps;
    if ((feasible && (!best_feasible || shrunk.nuclear_norm <= best_nuc)) ||
        (!feasible && !best_feasible && res < best_res)) {
      best = x;
      best_res = res;
      best_nuc = shrunk.nuclear_norm;
      best_feasible = feasible;
    }

    const bool at_floor = lambda <= floor;
    if (change < cfg.rel_tol && (feasible || at_floor)) {
      out.values = x;
      out.residual = res;
      out.threshold = lambda;
      out.converged = true;
      return out;
    }
    if (!feasible && !at_floor) {
      lambda = std::max(lambda * cfg.lambda_decay, floor);
    }
  }
  out.values = best;
  out.residual = best_res;
  out.threshold = lambda;
  out.converged = false;
  out.warnings.emplace_back("completion did not converge within max_iters");
  return out;
}

/// Dominant term of the sampling-error bound:
/// sqrt(M) * alpha * u(0) * K_u * L^3 / n^3.
inline double sampling_error_bound(const CharacteristicModel& model, double alpha,
                                   double side, std::size_t n, std::size_t count) {
  const double nn = static_cast<double>(n);
  return std::sqrt(static_cast<double>(count)) * alpha * model.peak() *
         model.slope_bound() * side * side * side / (nn * nn * nn);
}

/// delta = 4 sqrt((2 + p) n / p) eps_bar + 2 eps_bar with p = M / n^2.
inline double completion_error_bound(double epsilon_bar, std::size_t n, std::size_t count) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(count) / (nn * nn);
  if (!(p > 0.0)) throw Error(ErrorCode::kInvalidArgument, "completion bound needs M > 0");
  return 4.0 * std::sqrt((2.0 + p) * nn / p) * epsilon_bar + 2.0 * epsilon_bar;
}

/// Large-n form sqrt(32 / C) n / ln(n) eps_bar, valid when M ~ C n (ln n)^2.
inline double completion_error_bound_asymptotic(double epsilon_bar, std::size_t n,
                                                double c = 1.0) {
  const double nn = static_cast<double>(n);
  return std::sqrt(32.0 / c) * nn / std::log(nn) * epsilon_bar;
}

inline void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace eigloc
