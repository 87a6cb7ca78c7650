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

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "eigloc/csv.hpp"
#include "eigloc/error.hpp"
#include "eigloc/field_model.hpp"
#include "eigloc/rng.hpp"

namespace eigloc {

/// Square region [-L/2, L/2]^2 centered at the origin.
struct Region {
  double side = 2.0;

  explicit Region(double side_length) : side(side_length) {
    if (!(side_length > 0.0) || !std::isfinite(side_length)) {
      throw Error(ErrorCode::kInvalidArgument, "region side length must be positive");
    }
  }

  double half() const { return side / 2.0; }
  double area() const { return side * side; }
  bool contains(double x, double y) const {
    const double h = half() * (1.0 + 1e-12);
    return std::abs(x) <= h && std::abs(y) <= h;
  }
};

struct Sample {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
};

struct SampleSet {
  std::vector<Sample> records;
  std::uint64_t seed = 0;

  std::size_t size() const { return records.size(); }
};

/// n x n partition of the region. Cell (i, j), zero-based, is centered at
/// (-L/2 + L/(2n) + i L/n, -L/2 + L/(2n) + j L/n).
class GridSpec {
 public:
  GridSpec(std::size_t n, double side) : n_(n), side_(side) {
    if (n < 2) throw Error(ErrorCode::kInvalidArgument, "grid needs n >= 2");
    if (!(side > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "grid side length must be positive");
    }
  }

  std::size_t n() const { return n_; }
  double side() const { return side_; }
  double cell() const { return side_ / static_cast<double>(n_); }
  double cell_area() const { return cell() * cell(); }

  double center(std::size_t i) const {
    return -side_ / 2.0 + cell() / 2.0 + cell() * static_cast<double>(i);
  }

  std::vector<double> centers() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = center(i);
    return out;
  }

  /// Index of the cell containing coordinate c, or nullopt when outside.
  std::optional<std::size_t> cell_of(double c) const {
    const double half = side_ / 2.0;
    if (!(std::abs(c) <= half * (1.0 + 1e-12))) return std::nullopt;
    const double k = std::floor((c + half) / cell());
    if (k < 0.0) return 0;
    return std::min(n_ - 1, static_cast<std::size_t>(k));
  }

  /// Index of the nearest cell center, clamped to the grid.
  std::size_t nearest(double c) const {
    const double k = std::round((c - center(0)) / cell());
    if (k <= 0.0) return 0;
    return std::min(n_ - 1, static_cast<std::size_t>(k));
  }

 private:
  std::size_t n_;
  double side_;
};

/// Partially observed n x n matrix. Rows index x, columns index y.
struct ObservationMatrix {
  Eigen::MatrixXd values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::vector<std::pair<std::size_t, std::size_t>> omega;
  GridSpec grid;

  explicit ObservationMatrix(const GridSpec& g)
      : values(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.n()),
                                     static_cast<Eigen::Index>(g.n()))),
        mask(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            static_cast<Eigen::Index>(g.n()), static_cast<Eigen::Index>(g.n()),
            false)),
        grid(g) {}
};

/// M uniform positions over the region with h = field power plus optional
/// additive Gaussian noise clamped at zero. Deterministic in `seed`.
inline SampleSet draw_samples(const Region& region, const SourceConfig& cfg,
                              const CharacteristicModel& model, std::size_t count,
                              std::uint64_t seed, double noise_std = 0.0) {
  if (count == 0) throw Error(ErrorCode::kEmptySamples, "sample count must be >= 1");
  if (!(noise_std >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_std must be nonnegative");
  }
  Rng rng(seed);
  SampleSet out;
  out.seed = seed;
  out.records.reserve(count);
  const double half = region.half();
  for (std::size_t l = 0; l < count; ++l) {
    Sample s;
    s.x = rng.uniform(-half, half);
    s.y = rng.uniform(-half, half);
    s.h = field_power(cfg, model, s.x, s.y);
    if (noise_std > 0.0) s.h = std::max(0.0, s.h + noise_std * rng.normal());
    out.records.push_back(s);
  }
  return out;
}

/// Largest n >= 2 with n (ln n)^2 <= M / C.
inline std::size_t select_grid_dim(std::size_t count, double c = 1.0) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  const double budget = static_cast<double>(count) / c;
  auto cost = [](double n) {
    const double l = std::log(n);
    return n * l * l;
  };
  if (cost(2.0) > budget) {
    throw Error(ErrorCode::kInsufficientSamples,
                "too few samples for a 2x2 observation grid");
  }
  std::size_t n = 2;
  while (cost(static_cast<double>(n + 1)) <= budget) ++n;
  return n;
}

/// Bins samples into cells: entry = cell area * mean of the samples in the
/// cell; omega holds exactly the nonempty cells.
inline ObservationMatrix build_observation(const SampleSet& samples,
                                           const GridSpec& grid) {
  ObservationMatrix obs(grid);
  const auto n = static_cast<Eigen::Index>(grid.n());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXi hits = Eigen::MatrixXi::Zero(n, n);
  for (const auto& s : samples.records) {
    const auto i = grid.cell_of(s.x);
    const auto j = grid.cell_of(s.y);
    if (!i || !j) {
      throw Error(ErrorCode::kOutOfRegion, "sample outside the observation grid");
    }
    sum(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j)) += s.h;
    hits(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j)) += 1;
  }
  const double area = grid.cell_area();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (hits(i, j) == 0) continue;
      obs.values(i, j) = area * sum(i, j) / hits(i, j);
      obs.mask(i, j) = true;
      obs.omega.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  return obs;
}

/// Ideal observation H_ij = cell area * h(x_i, y_j).
inline Eigen::MatrixXd ideal_matrix(const SourceConfig& cfg,
                                    const CharacteristicModel& model,
                                    const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n());
  Eigen::MatrixXd h(n, n);
  const double area = grid.cell_area();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = area * field_power(cfg, model, grid.center(static_cast<std::size_t>(i)),
                                   grid.center(static_cast<std::size_t>(j)));
    }
  }
  return h;
}

/// Shortest decimal representation that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Header `x,y,h`, one row per sample.
inline void write_samples_csv(std::ostream& out, const SampleSet& samples) {
  out << "x,y,h\n";
  for (const auto& s : samples.records) {
    out << format_double(s.x) << ',' << format_double(s.y) << ','
        << format_double(s.h) << '\n';
  }
}

inline SampleSet read_samples_csv(std::istream& in) {
  const auto rows = csv::read_numeric(in, 3, {"x", "y", "h"});
  if (rows.empty()) throw ParseError(1, "no samples");
  SampleSet out;
  out.records.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k][2] < 0.0) {
      throw Error(ErrorCode::kParse, "negative power in sample " + std::to_string(k + 1));
    }
    out.records.push_back({rows[k][0], rows[k][1], rows[k][2]});
  }
  return out;
}

}  // namespace eigloc
