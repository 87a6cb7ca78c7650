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

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "eigloc/error.hpp"
#include "eigloc/linalg.hpp"
#include "eigloc/optimize.hpp"
#include "eigloc/piecewise_linear.hpp"
#include "eigloc/sampling.hpp"

namespace eigloc {

/// Leading singular triplets, values descending.
struct SpectralDecomposition {
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd left;   // columns are left singular vectors
  Eigen::MatrixXd right;  // columns are right singular vectors
  std::size_t k = 0;

  Eigen::MatrixXd reconstruct() const {
    return left * singular_values.asDiagonal() * right.transpose();
  }
};

/// Top-k SVD. Each pair (u_i, v_i) is flipped jointly so that sum(u_i) >= 0;
/// for the dominant pair of a nonnegative matrix this also makes
/// sum(v_i) >= 0.
inline SpectralDecomposition svd_top(const Eigen::MatrixXd& matrix, std::size_t k) {
  const auto dim = static_cast<std::size_t>(std::min(matrix.rows(), matrix.cols()));
  if (k > dim) throw Error(ErrorCode::kInvalidArgument, "svd_top: k exceeds matrix dimension");
  const ThinSvd svd = thin_svd(matrix);
  const auto kk = static_cast<Eigen::Index>(k);
  SpectralDecomposition out;
  out.k = k;
  out.singular_values = svd.values.head(kk);
  out.left = svd.left.leftCols(kk);
  out.right = svd.right.leftCols(kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    const double su = out.left.col(c).sum();
    const double sv = out.right.col(c).sum();
    if (su < 0.0 || (su == 0.0 && sv < 0.0)) {
      out.left.col(c) *= -1.0;
      out.right.col(c) *= -1.0;
    }
  }
  return out;
}

inline VectorRegression make_regression(std::span<const double> coords,
                                        const Eigen::VectorXd& values) {
  std::vector<double> ys(values.data(), values.data() + values.size());
  return VectorRegression(std::vector<double>(coords.begin(), coords.end()), std::move(ys));
}

/// R(t) = integral of f(x) f(t - x) dx, exact for the piecewise-linear model.
inline double reflected_correlation(const VectorRegression& reg, double t) {
  return product_integral(reg, reg.reflected(t));
}

/// argmax_t R(t) over [2 x_1, 2 x_n]: scan at (grid step)/10, refine to
/// (grid step)/1000.
inline double argmax_reflected(const VectorRegression& reg) {
  const auto ys = reg.ys();
  bool nonzero = false;
  for (double y : ys) nonzero = nonzero || y != 0.0;
  if (!nonzero) throw Error(ErrorCode::kDegenerateVector, "reflected correlation of a zero vector");
  const double step = (reg.back() - reg.front()) / static_cast<double>(reg.size() - 1);
  const auto best = maximize_scan_golden(
      [&](double t) { return reflected_correlation(reg, t); }, 2.0 * reg.front(),
      2.0 * reg.back(), step / 10.0, step / 1000.0);
  return best.arg;
}

struct SingleEstimate {
  double x = 0.0;
  double y = 0.0;
  double t_x = 0.0;
  double t_y = 0.0;
  Eigen::VectorXd singular_values;
};

/// Source position from the dominant singular pair: half the maximizer of
/// the reflected correlation of the left (x) and right (y) vectors.
inline SingleEstimate localize_single(const Eigen::MatrixXd& completed, const GridSpec& grid) {
  if (static_cast<std::size_t>(completed.rows()) != grid.n() ||
      static_cast<std::size_t>(completed.cols()) != grid.n()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix does not match grid");
  }
  if (!(completed.norm() > 0.0)) {
    throw Error(ErrorCode::kDegenerateVector, "completed matrix is zero");
  }
  const auto svd = svd_top(completed, std::min<std::size_t>(grid.n(), 3));
  const auto coords = grid.centers();
  SingleEstimate est;
  est.t_x = argmax_reflected(make_regression(coords, svd.left.col(0)));
  est.t_y = argmax_reflected(make_regression(coords, svd.right.col(0)));
  est.x = est.t_x / 2.0;
  est.y = est.t_y / 2.0;
  est.singular_values = svd.singular_values;
  return est;
}

}  // namespace eigloc
