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

#include "eigloc/error.hpp"

namespace eigloc {

struct ScalarMaximum {
  double arg = 0.0;
  double value = 0.0;
};

/// Global maximizer of f on [lo, hi]: a uniform scan at `coarse_step`
/// followed by golden-section refinement around the best scan point until
/// the bracket is narrower than `fine_step`. Ties in the scan go to the
/// leftmost point.
template <typename F>
ScalarMaximum maximize_scan_golden(F&& f, double lo, double hi,
                                   double coarse_step, double fine_step) {
  if (!(hi >= lo) || !(coarse_step > 0.0) || !(fine_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "maximize: bad search interval");
  }
  const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / coarse_step));
  ScalarMaximum best{lo, f(lo)};
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = std::min(hi, lo + static_cast<double>(k) * coarse_step);
    const double v = f(t);
    if (v > best.value) best = {t, v};
  }

  double a = std::max(lo, best.arg - coarse_step);
  double b = std::min(hi, best.arg + coarse_step);
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > fine_step) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const ScalarMaximum refined = fc >= fd ? ScalarMaximum{c, fc} : ScalarMaximum{d, fd};
  return refined.value >= best.value ? refined : best;
}

}  // namespace eigloc
