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

namespace eigloc {

/// Thin SVD with singular values in decreasing order.
struct ThinSvd {
  Eigen::VectorXd values;
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
};

// Eigen 3.4's divide-and-conquer SVD occasionally returns NaN on nearly
// rank-deficient input; the one-sided Jacobi solver is slower but robust.
inline ThinSvd thin_svd(const Eigen::MatrixXd& m) {
  constexpr int kOpts = Eigen::ComputeThinU | Eigen::ComputeThinV;
  Eigen::BDCSVD<Eigen::MatrixXd> fast(m, kOpts);
  if (fast.singularValues().allFinite() && fast.matrixU().allFinite() &&
      fast.matrixV().allFinite()) {
    return {fast.singularValues(), fast.matrixU(), fast.matrixV()};
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> slow(m, kOpts);
  return {slow.singularValues(), slow.matrixU(), slow.matrixV()};
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> fast(m);
  if (fast.singularValues().allFinite()) return fast.singularValues();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

}  // namespace eigloc
