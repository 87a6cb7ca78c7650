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

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "eigloc/error.hpp"

namespace eigloc {

/// Piecewise-linear function through (x_i, y_i), zero outside [x_1, x_n].
///
/// This is the regression used for singular vectors: evaluating at a
/// breakpoint returns the stored value exactly. Products of two such
/// functions are integrated exactly on the merged breakpoint set.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "piecewise-linear: coordinate/value size mismatch");
    }
    if (xs_.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "piecewise-linear: need at least two breakpoints");
    }
    for (std::size_t i = 1; i < xs_.size(); ++i) {
      if (!(xs_[i] > xs_[i - 1])) {
        throw Error(ErrorCode::kInvalidArgument,
                    "piecewise-linear: breakpoints must be strictly increasing");
      }
    }
  }

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::size_t size() const { return xs_.size(); }
  double front() const { return xs_.front(); }
  double back() const { return xs_.back(); }

  double operator()(double x) const {
    if (xs_.empty() || x < xs_.front() || x > xs_.back()) return 0.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.end()) return ys_.back();
    const auto hi = static_cast<std::size_t>(it - xs_.begin());
    const auto lo = hi - 1;
    if (x == xs_[lo]) return ys_[lo];
    const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + w * (ys_[hi] - ys_[lo]);
  }

  /// x -> f(x - s).
  PiecewiseLinear shifted(double s) const {
    PiecewiseLinear out = *this;
    for (double& x : out.xs_) x += s;
    return out;
  }

  /// x -> f(t - x).
  PiecewiseLinear reflected(double t) const {
    PiecewiseLinear out;
    const std::size_t n = xs_.size();
    out.xs_.resize(n);
    out.ys_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.xs_[i] = t - xs_[n - 1 - i];
      out.ys_[i] = ys_[n - 1 - i];
    }
    return out;
  }

  PiecewiseLinear scaled(double c) const {
    PiecewiseLinear out = *this;
    for (double& y : out.ys_) y *= c;
    return out;
  }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

using VectorRegression = PiecewiseLinear;

namespace detail {

// Value of f at x for a cursor that only moves forward; x must be inside f's
// support and non-decreasing across calls.
struct ForwardCursor {
  const PiecewiseLinear* f;
  std::size_t seg = 0;

  double at(double x) {
    const auto xs = f->xs();
    const auto ys = f->ys();
    while (seg + 2 < xs.size() && xs[seg + 1] <= x) ++seg;
    const double x0 = xs[seg], x1 = xs[seg + 1];
    if (x <= x0) return ys[seg];
    if (x >= x1) return ys[seg + 1];
    const double w = (x - x0) / (x1 - x0);
    return ys[seg] + w * (ys[seg + 1] - ys[seg]);
  }
};

}  // namespace detail

/// Exact integral of f(x) * g(x) over the real line.
inline double product_integral(const PiecewiseLinear& f,
                               const PiecewiseLinear& g) {
  if (f.size() < 2 || g.size() < 2) return 0.0;
  const double lo = std::max(f.front(), g.front());
  const double hi = std::min(f.back(), g.back());
  if (!(hi > lo)) return 0.0;

  const auto fx = f.xs();
  const auto gx = g.xs();
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(fx.begin(), fx.end(), lo) - fx.begin());
  std::size_t j = static_cast<std::size_t>(
      std::upper_bound(gx.begin(), gx.end(), lo) - gx.begin());

  detail::ForwardCursor cf{&f};
  detail::ForwardCursor cg{&g};
  double a = lo;
  double fa = cf.at(a), ga = cg.at(a);
  double total = 0.0;
  while (a < hi) {
    double b = hi;
    if (i < fx.size() && fx[i] < b) b = fx[i];
    if (j < gx.size() && gx[j] < b) b = gx[j];
    const double fb = cf.at(b), gb = cg.at(b);
    total += (b - a) / 6.0 * (2.0 * fa * ga + fa * gb + fb * ga + 2.0 * fb * gb);
    if (i < fx.size() && fx[i] == b) ++i;
    if (j < gx.size() && gx[j] == b) ++j;
    a = b;
    fa = fb;
    ga = gb;
  }
  return total;
}

inline double squared_norm(const PiecewiseLinear& f) {
  return product_integral(f, f);
}

}  // namespace eigloc
