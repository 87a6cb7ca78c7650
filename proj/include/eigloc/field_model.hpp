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
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "eigloc/csv.hpp"
#include "eigloc/error.hpp"
#include "eigloc/piecewise_linear.hpp"

namespace eigloc {

enum class ModelFamily { kGaussian, kLaplacian, kTabulated };

/// Marginal density u(x) of a decomposable source footprint.
///
/// Gaussian:  u(x) = (2g/pi)^(1/4) exp(-g x^2)
/// Laplacian: u(x) = sqrt(g) exp(-g |x|)
/// Tabulated: linear interpolation through user samples, zero outside,
///            rescaled on construction so that the integral of u^2 is one.
class CharacteristicModel {
 public:
  static CharacteristicModel gaussian(double gamma) {
    check_gamma(gamma);
    CharacteristicModel m;
    m.family_ = ModelFamily::kGaussian;
    m.gamma_ = gamma;
    return m;
  }

  static CharacteristicModel laplacian(double gamma) {
    check_gamma(gamma);
    CharacteristicModel m;
    m.family_ = ModelFamily::kLaplacian;
    m.gamma_ = gamma;
    return m;
  }

  static CharacteristicModel tabulated(std::vector<double> xs,
                                       std::vector<double> us) {
    if (xs.size() < 2 || xs.size() != us.size()) {
      throw Error(ErrorCode::kInvalidModel,
                  "tabulated model needs at least two (x, u) points");
    }
    for (double u : us) {
      if (!(u >= 0.0) || !std::isfinite(u)) {
        throw Error(ErrorCode::kInvalidModel, "tabulated model has u < 0");
      }
    }
    CharacteristicModel m;
    m.family_ = ModelFamily::kTabulated;
    try {
      m.table_ = PiecewiseLinear(std::move(xs), std::move(us));
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidModel, e.what());
    }
    const double energy = squared_norm(m.table_);
    if (!(energy > 0.0)) {
      throw Error(ErrorCode::kInvalidModel, "tabulated model is identically zero");
    }
    m.applied_scale_ = 1.0 / std::sqrt(energy);
    m.table_ = m.table_.scaled(m.applied_scale_);
    return m;
  }

  /// Two-column (x, u) CSV; header optional.
  static CharacteristicModel tabulated_csv(std::istream& in) {
    const auto rows = csv::read_numeric(in, 2);
    std::vector<double> xs, us;
    for (const auto& r : rows) {
      xs.push_back(r[0]);
      us.push_back(r[1]);
    }
    return tabulated(std::move(xs), std::move(us));
  }

  ModelFamily family() const { return family_; }
  double gamma() const { return gamma_; }
  const PiecewiseLinear& table() const { return table_; }
  /// Factor applied to the user's table during normalization (1 otherwise).
  double applied_scale() const { return applied_scale_; }

  double operator()(double x) const {
    switch (family_) {
      case ModelFamily::kGaussian:
        return std::pow(2.0 * gamma_ / std::numbers::pi, 0.25) *
               std::exp(-gamma_ * x * x);
      case ModelFamily::kLaplacian:
        return std::sqrt(gamma_) * std::exp(-gamma_ * std::abs(x));
      case ModelFamily::kTabulated:
        return table_(x);
    }
    return 0.0;
  }

  /// u'(x). The Laplacian kink at 0 returns 0; tabulated returns the
  /// slope of the segment containing x (right segment at breakpoints).
  double derivative(double x) const {
    switch (family_) {
      case ModelFamily::kGaussian:
        return -2.0 * gamma_ * x * (*this)(x);
      case ModelFamily::kLaplacian:
        if (x == 0.0) return 0.0;
        return -gamma_ * std::copysign(1.0, x) * (*this)(x);
      case ModelFamily::kTabulated: {
        const auto xs = table_.xs();
        const auto ys = table_.ys();
        if (x < xs.front() || x >= xs.back()) return 0.0;
        const auto hi = static_cast<std::size_t>(
            std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        return (ys[hi] - ys[hi - 1]) / (xs[hi] - xs[hi - 1]);
      }
    }
    return 0.0;
  }

  double peak() const { return (*this)(0.0); }

  /// K_u = sup |u'(x)|.
  double slope_bound() const {
    switch (family_) {
      case ModelFamily::kGaussian:
        return std::pow(2.0 * gamma_ / std::numbers::pi, 0.25) *
               std::sqrt(2.0 * gamma_ / std::numbers::e);
      case ModelFamily::kLaplacian:
        return gamma_ * std::sqrt(gamma_);
      case ModelFamily::kTabulated: {
        const auto xs = table_.xs();
        const auto ys = table_.ys();
        double k = 0.0;
        for (std::size_t i = 1; i < xs.size(); ++i) {
          k = std::max(k, std::abs((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])));
        }
        return k;
      }
    }
    return 0.0;
  }

  /// Half-width beyond which u(x) < 1e-12 u(0).
  double support_half_width() const {
    constexpr double kLogRatio = 27.631021115928547;  // ln(1e12)
    switch (family_) {
      case ModelFamily::kGaussian:
        return std::sqrt(kLogRatio / gamma_);
      case ModelFamily::kLaplacian:
        return kLogRatio / gamma_;
      case ModelFamily::kTabulated:
        return std::max(std::abs(table_.front()), std::abs(table_.back()));
    }
    return 0.0;
  }

 private:
  static void check_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::kInvalidModel, "shape parameter must be positive");
    }
  }

  ModelFamily family_ = ModelFamily::kGaussian;
  double gamma_ = 1.0;
  PiecewiseLinear table_;
  double applied_scale_ = 1.0;
};

inline double eval_u(const CharacteristicModel& model, double x) {
  return model(x);
}

struct Source {
  double x = 0.0;
  double y = 0.0;
  double alpha = 1.0;
};

struct SourceConfig {
  std::vector<Source> sources;

  std::size_t size() const { return sources.size(); }

  /// K in {1, 2}, positive alphas, all sources inside [-L/2, L/2]^2.
  void validate(double side_length) const {
    if (sources.empty() || sources.size() > 2) {
      throw Error(ErrorCode::kInvalidArgument, "source count must be 1 or 2");
    }
    const double half = side_length / 2.0;
    for (const auto& s : sources) {
      if (!(s.alpha > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "source alpha must be positive");
      }
      if (std::abs(s.x) > half || std::abs(s.y) > half) {
        throw Error(ErrorCode::kOutOfRegion, "source outside region of interest");
      }
    }
  }
};

/// Aggregate power sum_k alpha_k u(x - x_k) u(y - y_k).
inline double field_power(const SourceConfig& cfg,
                          const CharacteristicModel& model, double x,
                          double y) {
  double h = 0.0;
  for (const auto& s : cfg.sources) h += s.alpha * model(x - s.x) * model(y - s.y);
  return h;
}

/// tau(t) = integral of u(x) u(x - t) dx.
inline double autocorrelation(const CharacteristicModel& model, double t) {
  const double g = model.gamma();
  switch (model.family()) {
    case ModelFamily::kGaussian:
      return std::exp(-g * t * t / 2.0);
    case ModelFamily::kLaplacian:
      return (1.0 + g * std::abs(t)) * std::exp(-g * std::abs(t));
    case ModelFamily::kTabulated:
      return product_integral(model.table(), model.table().shifted(t));
  }
  return 0.0;
}

/// tau'(t). Both closed forms are odd in t and vanish at 0. Tabulated
/// models use a central difference with step (support width)/1000.
inline double autocorrelation_deriv(const CharacteristicModel& model, double t) {
  const double g = model.gamma();
  switch (model.family()) {
    case ModelFamily::kGaussian:
      return -g * t * std::exp(-g * t * t / 2.0);
    case ModelFamily::kLaplacian:
      return -g * g * t * std::exp(-g * std::abs(t));
    case ModelFamily::kTabulated: {
      const double h = (model.table().back() - model.table().front()) / 1000.0;
      return (autocorrelation(model, t + h) - autocorrelation(model, t - h)) /
             (2.0 * h);
    }
  }
  return 0.0;
}

/// tau^{-1}(r) on t >= 0 by bisection; tau is strictly decreasing there.
/// Returns NaN when r is outside (0, 1].
inline double inverse_autocorrelation(const CharacteristicModel& model, double r) {
  if (!(r > 0.0) || r > 1.0) return std::numeric_limits<double>::quiet_NaN();
  double lo = 0.0;
  double hi = 2.0 * model.support_half_width();
  if (autocorrelation(model, hi) > r) return std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (autocorrelation(model, mid) > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct UnimodalityCheck {
  bool satisfied = false;
  double worst_margin = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
};

/// Evaluates s tau'(t) - t tau'(s) for every pair 0 < s < t on the grid
/// t_k = k t_max / grid_points, k = 1..grid_points. Holds iff every margin
/// is strictly positive.
inline UnimodalityCheck check_unimodality_condition(
    const CharacteristicModel& model, double t_max, std::size_t grid_points) {
  if (!(t_max > 0.0) || grid_points < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "unimodality check needs t_max > 0 and at least two points");
  }
  std::vector<double> ts(grid_points), dtau(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    ts[k] = t_max * static_cast<double>(k + 1) / static_cast<double>(grid_points);
    dtau[k] = autocorrelation_deriv(model, ts[k]);
  }
  UnimodalityCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < grid_points; ++a) {
    for (std::size_t b = a + 1; b < grid_points; ++b) {
      const double margin = ts[a] * dtau[b] - ts[b] * dtau[a];
      if (margin < out.worst_margin) {
        out.worst_margin = margin;
        out.worst_s = ts[a];
        out.worst_t = ts[b];
      }
    }
  }
  out.satisfied = out.worst_margin > 0.0;
  return out;
}

struct ModelCheck {
  bool ok = true;
  std::string failure;
};

/// Checks nonnegativity, symmetry, strict decrease for x > 0 and unit
/// energy on a grid of `points` samples over the support.
inline ModelCheck validate(const CharacteristicModel& model,
                           std::size_t points = 2001) {
  const double w = model.support_half_width();
  const double u0 = model.peak();
  ModelCheck out;
  auto fail = [&](std::string msg) {
    if (out.ok) {
      out.ok = false;
      out.failure = std::move(msg);
    }
  };
  double prev = u0;
  for (std::size_t k = 1; k < points; ++k) {
    const double x = w * static_cast<double>(k) / static_cast<double>(points - 1);
    const double u = model(x);
    if (u < 0.0) fail("u(x) < 0");
    if (std::abs(u - model(-x)) > 1e-9 * u0) fail("u is not symmetric");
    if (u > 1e-12 * u0 && !(u < prev)) fail("u is not strictly decreasing for x > 0");
    prev = u;
  }
  // Energy by composite trapezoid over [-w, w].
  const std::size_t n = 20 * points;
  const double h = 2.0 * w / static_cast<double>(n);
  double energy = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double u = model(-w + h * static_cast<double>(k));
    energy += (k == 0 || k == n ? 0.5 : 1.0) * u * u;
  }
  energy *= h;
  if (model.family() == ModelFamily::kTabulated) energy = squared_norm(model.table());
  if (std::abs(energy - 1.0) > 1e-6) fail("integral of u^2 differs from 1");
  return out;
}

}  // namespace eigloc
