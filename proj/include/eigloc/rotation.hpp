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
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "eigloc/error.hpp"
#include "eigloc/linalg.hpp"
#include "eigloc/sampling.hpp"

namespace eigloc {

enum class Resampling { kNearest, kBilinear, kBicubic };

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

inline constexpr double degrees(double deg) { return deg * std::numbers::pi / 180.0; }

/// Matrix of the completed field seen from a frame rotated by theta.
struct RotatedMatrix {
  Eigen::MatrixXd values;
  double theta = 0.0;
  std::size_t n_prime = 0;
  GridSpec grid_prime{2, 1.0};
};

/// Side of the rotated grid: the largest n' <= n / sqrt(2) with n - n' even,
/// so the rotated cells share the original spacing and centering and the
/// square stays inside the region under any rotation.
inline std::size_t rotated_dimension(std::size_t n) {
  auto np = static_cast<std::size_t>(std::floor(static_cast<double>(n) / std::numbers::sqrt2));
  if ((n - np) % 2 != 0) --np;
  return std::max<std::size_t>(np, 2);
}

namespace detail {

inline double bilinear(const Eigen::MatrixXd& m, const GridSpec& grid, double x, double y) {
  const auto n = static_cast<double>(grid.n());
  auto locate = [&](double c, Eigen::Index& lo, double& w) {
    double k = (c - grid.center(0)) / grid.cell();
    k = std::clamp(k, 0.0, n - 1.0);
    lo = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(k)),
                                static_cast<Eigen::Index>(grid.n()) - 2);
    w = k - static_cast<double>(lo);
  };
  Eigen::Index i = 0, j = 0;
  double wx = 0.0, wy = 0.0;
  locate(x, i, wx);
  locate(y, j, wy);
  return (1 - wx) * (1 - wy) * m(i, j) + wx * (1 - wy) * m(i + 1, j) +
         (1 - wx) * wy * m(i, j + 1) + wx * wy * m(i + 1, j + 1);
}

/// Catmull-Rom interpolation; indices beyond the edge are clamped.
inline double bicubic(const Eigen::MatrixXd& m, const GridSpec& grid, double x, double y) {
  const auto last = static_cast<Eigen::Index>(grid.n()) - 1;
  auto locate = [&](double c, Eigen::Index& lo, double& w) {
    double k = std::clamp((c - grid.center(0)) / grid.cell(), 0.0, static_cast<double>(last));
    lo = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(k)), last - 1);
    w = k - static_cast<double>(lo);
  };
  auto weights = [](double t, double* w) {
    const double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2 * t2 - t);
    w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
  };
  Eigen::Index i = 0, j = 0;
  double tx = 0.0, ty = 0.0;
  locate(x, i, tx);
  locate(y, j, ty);
  double wx[4], wy[4];
  weights(tx, wx);
  weights(ty, wy);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const Eigen::Index r = std::clamp<Eigen::Index>(i - 1 + a, 0, last);
    for (int b = 0; b < 4; ++b) {
      const Eigen::Index c = std::clamp<Eigen::Index>(j - 1 + b, 0, last);
      acc += wx[a] * wy[b] * m(r, c);
    }
  }
  return acc;
}

}  // namespace detail

/// Entry (i, j) takes the completed-matrix value at the grid point nearest
/// to the back-rotated center (x'_i cos t - y'_j sin t, x'_i sin t + y'_j cos t)
/// of rotated cell (i, j). At theta = 0 this is the central n' x n' block.
inline RotatedMatrix rotate_observation(const Eigen::MatrixXd& completed, const GridSpec& grid,
                                        double theta,
                                        Resampling mode = Resampling::kNearest) {
  if (!(theta >= 0.0 && theta <= kHalfPi)) {
    throw Error(ErrorCode::kInvalidArgument, "rotation angle must lie in [0, pi/2]");
  }
  if (static_cast<std::size_t>(completed.rows()) != grid.n() ||
      static_cast<std::size_t>(completed.cols()) != grid.n()) {
    throw Error(ErrorCode::kInvalidArgument, "matrix does not match grid");
  }
  const std::size_t np = rotated_dimension(grid.n());
  RotatedMatrix out;
  out.theta = theta;
  out.n_prime = np;
  out.grid_prime = GridSpec(np, grid.cell() * static_cast<double>(np));
  const auto dim = static_cast<Eigen::Index>(np);
  out.values.resize(dim, dim);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const auto centers = out.grid_prime.centers();
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double a = centers[static_cast<std::size_t>(i)];
      const double b = centers[static_cast<std::size_t>(j)];
      const double x = a * c - b * s;
      const double y = a * s + b * c;
      if (mode == Resampling::kNearest) {
        out.values(i, j) = completed(static_cast<Eigen::Index>(grid.nearest(x)),
                                     static_cast<Eigen::Index>(grid.nearest(y)));
      } else if (mode == Resampling::kBilinear) {
        out.values(i, j) = detail::bilinear(completed, grid, x, y);
      } else {
        out.values(i, j) = detail::bicubic(completed, grid, x, y);
      }
    }
  }
  return out;
}

/// rho = sigma_1 / sum_k sigma_k.
inline double alignment_ratio(const Eigen::MatrixXd& m) {
  const Eigen::VectorXd s = singular_values(m);
  const double total = s.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerateMatrix, "alignment ratio of a zero matrix");
  return s(0) / total;
}

inline double alignment_ratio(const RotatedMatrix& rot) { return alignment_ratio(rot.values); }

struct RotationScan {
  std::vector<double> thetas;
  std::vector<double> rhos;
  double theta_star = 0.0;
  double rho_star = 0.0;

  double contrast() const {
    if (rhos.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(rhos.begin(), rhos.end());
    return *hi - *lo;
  }
};

/// rho on the uniform grid 0, step, 2 step, ... covering [0, pi/2]; the last
/// point is pi/2 itself. theta_star is the first grid maximizer.
inline RotationScan rho_scan(const Eigen::MatrixXd& completed, const GridSpec& grid,
                             double theta_step, Resampling mode = Resampling::kNearest) {
  if (!(theta_step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "theta_step must be positive");
  RotationScan scan;
  const auto steps = static_cast<std::size_t>(std::ceil(kHalfPi / theta_step - 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double theta = std::min(kHalfPi, theta_step * static_cast<double>(k));
    scan.thetas.push_back(theta);
    scan.rhos.push_back(alignment_ratio(rotate_observation(completed, grid, theta, mode)));
  }
  const auto best = std::max_element(scan.rhos.begin(), scan.rhos.end());
  scan.theta_star = scan.thetas[static_cast<std::size_t>(best - scan.rhos.begin())];
  scan.rho_star = *best;
  return scan;
}

inline void write_scan_csv(std::ostream& out, const RotationScan& scan) {
  out << "theta,rho\n";
  for (std::size_t k = 0; k < scan.thetas.size(); ++k) {
    out << format_double(scan.thetas[k]) << ',' << format_double(scan.rhos[k]) << '\n';
  }
}

struct RotationSearch {
  double theta_star = 0.0;
  double rho_star = 0.0;
  std::size_t iterations = 0;
  /// Every (theta, rho) evaluated, in evaluation order.
  std::vector<std::pair<double, double>> evaluations;

  double contrast() const {
    if (evaluations.empty()) return 0.0;
    double lo = evaluations.front().second, hi = lo;
    for (const auto& e : evaluations) {
      lo = std::min(lo, e.second);
      hi = std::max(hi, e.second);
    }
    return hi - lo;
  }
};

/// Smoothed bisection for the maximizer of rho on [0, pi/2]. Each step
/// averages rho over T points of each half,
///   left:  theta_c - (i/T)(theta_c - theta_L),  i = 1..T
///   right: theta_c + (i/T)(theta_R - theta_c),  i = 1..T
/// and keeps the half with the larger average, until theta_R - theta_L < tol.
inline RotationSearch find_rotation(const Eigen::MatrixXd& completed, const GridSpec& grid,
                                    std::size_t smoothing = 5, double tol = degrees(0.5),
                                    Resampling mode = Resampling::kNearest) {
  if (smoothing < 1) throw Error(ErrorCode::kInvalidArgument, "smoothing count T must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "angle tolerance must be positive");
  RotationSearch out;
  auto rho = [&](double theta) {
    const double r = alignment_ratio(rotate_observation(completed, grid, theta, mode));
    out.evaluations.emplace_back(theta, r);
    return r;
  };
  double lo = 0.0;
  double hi = kHalfPi;
  const auto t = static_cast<double>(smoothing);
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    double left = 0.0, right = 0.0;
    for (std::size_t i = 1; i <= smoothing; ++i) {
      const double f = static_cast<double>(i) / t;
      left += rho(mid - f * (mid - lo));
      right += rho(mid + f * (hi - mid));
    }
    if (left > right) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++out.iterations;
  }
  out.theta_star = 0.5 * (lo + hi);
  out.rho_star = rho(out.theta_star);
  return out;
}

/// Distance between two angles modulo pi/2 (rho is pi/2-periodic).
inline double angle_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), kHalfPi);
  return std::min(d, kHalfPi - d);
}

}  // namespace eigloc
