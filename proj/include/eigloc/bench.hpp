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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eigloc/completion.hpp"
#include "eigloc/dual_source.hpp"
#include "eigloc/field_model.hpp"
#include "eigloc/rng.hpp"
#include "eigloc/sampling.hpp"
#include "eigloc/spectral.hpp"

namespace eigloc {

enum class Scenario { kSingleSource, kDoubleSource };

inline constexpr std::string_view to_string(Scenario s) {
  return s == Scenario::kSingleSource ? "single" : "double";
}

/// Where the sources sit in each trial. Random placement draws every
/// coordinate uniformly from [-half_extent, half_extent]; two sources are
/// redrawn until their distance is at most max_separation.
struct Placement {
  bool random = true;
  double half_extent = 0.5;
  double max_separation = 0.5;
  double alpha = 1.0;
  SourceConfig fixed;
};

struct ExperimentSpec {
  Scenario scenario = Scenario::kSingleSource;
  std::vector<std::size_t> m_list{100, 200, 400, 800, 1600, 3200};
  std::size_t trials = 200;
  std::uint64_t base_seed = 0;
  double side = 2.0;
  CharacteristicModel model = CharacteristicModel::gaussian(20.0);
  double c = 1.0;
  double noise_std = 0.0;
  Placement placement;
  CompletionConfig completion;
  DualOptions dual;
  double c_mu = 1.0;
  double c_e = 1.0;

  std::size_t source_count() const { return scenario == Scenario::kSingleSource ? 1 : 2; }

  void validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
    if (trials < 1) bad("trials must be >= 1");
    if (m_list.empty()) bad("M list is empty");
    if (!std::is_sorted(m_list.begin(), m_list.end())) bad("M list must be sorted ascending");
    for (auto m : m_list) {
      if (m < 1) bad("every M must be >= 1");
    }
    if (!(side > 0.0) || !std::isfinite(side)) bad("region side must be positive");
    if (!(c > 0.0)) bad("C must be positive");
    if (!(noise_std >= 0.0)) bad("noise_std must be nonnegative");
    if (!(c_mu > 0.0) || !(c_e > 0.0)) bad("bound constants must be positive");
    if (placement.random) {
      if (!(placement.half_extent > 0.0) || placement.half_extent > side / 2.0) {
        bad("placement extent must lie inside the region");
      }
      if (!(placement.alpha > 0.0)) bad("source alpha must be positive");
      if (scenario == Scenario::kDoubleSource && !(placement.max_separation > 0.0)) {
        bad("max separation must be positive");
      }
    } else {
      if (placement.fixed.size() != source_count()) {
        bad("fixed placement must list exactly " + std::to_string(source_count()) +
            " source(s)");
      }
      try {
        placement.fixed.validate(side);
      } catch (const Error& e) {
        bad(e.what());
      }
    }
    if (scenario == Scenario::kDoubleSource) {
      if (dual.smoothing < 1 || !(dual.tol > 0.0)) bad("invalid rotation search options");
    }
    try {
      completion.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
  }
};

struct ExperimentRecord {
  std::size_t m = 0;
  std::size_t n_c = 0;
  double mse_proposed = 0.0;
  double mse_naive = 0.0;
  double median_proposed = 0.0;
  double median_naive = 0.0;
  /// Corollary form for Gaussian models, Theorem form otherwise; NaN when
  /// not applicable.
  double bound = 0.0;
  std::size_t trials_ok = 0;
  std::size_t trials_failed = 0;
  std::size_t completion_not_converged = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  std::uint64_t base_seed = 0;
  std::uint64_t spec_hash = 0;
};

/// Position of the strongest sample; the first one wins ties.
inline Point naive_localize(const SampleSet& samples) {
  if (samples.records.empty()) throw Error(ErrorCode::kEmptySamples, "no samples");
  const Sample* best = &samples.records.front();
  for (const auto& s : samples.records) {
    if (s.h > best->h) best = &s;
  }
  return {best->x, best->y};
}

struct BoundPoint {
  std::size_t m = 0;
  std::size_t n_c = 0;
  /// C_mu L^6 n^-3 (Gaussian models only, NaN otherwise).
  double corollary = 0.0;
  /// 0.5 tau^-1(1 - mu_u L^6 n^-3); NaN when the argument leaves (0, 1].
  double theorem = 0.0;
};

/// mu_u = C_e * 128 * u(0)^2 * K_u^2.
inline double mu_u(const CharacteristicModel& model, double c_e) {
  const double p = model.peak();
  const double k = model.slope_bound();
  return c_e * 128.0 * p * p * k * k;
}

inline std::vector<BoundPoint> bound_curve(const CharacteristicModel& model, double side,
                                           double c, double c_mu, double c_e,
                                           const std::vector<std::size_t>& m_list) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double l6 = std::pow(side, 6);
  const double mu = mu_u(model, c_e);
  std::vector<BoundPoint> out;
  for (auto m : m_list) {
    BoundPoint b;
    b.m = m;
    b.n_c = select_grid_dim(m, c);
    const double n3 = std::pow(static_cast<double>(b.n_c), 3);
    b.corollary = model.family() == ModelFamily::kGaussian ? c_mu * l6 / n3 : nan;
    b.theorem = 0.5 * inverse_autocorrelation(model, 1.0 - mu * l6 / n3);
    out.push_back(b);
  }
  return out;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline SourceConfig place_sources(const ExperimentSpec& spec, std::uint64_t seed) {
  if (!spec.placement.random) return spec.placement.fixed;
  Rng rng(seed);
  const double a = spec.placement.half_extent;
  const double alpha = spec.placement.alpha;
  SourceConfig cfg;
  if (spec.scenario == Scenario::kSingleSource) {
    const double x = rng.uniform(-a, a);
    const double y = rng.uniform(-a, a);
    cfg.sources = {Source{x, y, alpha}};
    return cfg;
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Source s1{rng.uniform(-a, a), rng.uniform(-a, a), alpha};
    Source s2{rng.uniform(-a, a), rng.uniform(-a, a), alpha};
    if (std::hypot(s1.x - s2.x, s1.y - s2.y) <= spec.placement.max_separation) {
      cfg.sources = {s1, s2};
      return cfg;
    }
  }
  throw Error(ErrorCode::kConfig, "could not place two sources within max separation");
}

struct TrialOutcome {
  bool ok = false;
  bool converged = true;
  double proposed = 0.0;
  double naive = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace detail

/// Canonical text form of a spec; its FNV-1a hash identifies the run.
inline std::string describe(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "scenario=" << to_string(spec.scenario) << ";M=";
  for (auto m : spec.m_list) os << m << ',';
  os << ";trials=" << spec.trials << ";seed=" << spec.base_seed
     << ";side=" << format_double(spec.side) << ";family=" << static_cast<int>(spec.model.family())
     << ";gamma=" << format_double(spec.model.gamma());
  if (spec.model.family() == ModelFamily::kTabulated) {
    const auto& t = spec.model.table();
    for (std::size_t i = 0; i < t.size(); ++i) {
      os << format_double(t.xs()[i]) << ':' << format_double(t.ys()[i]) << ',';
    }
  }
  os << ";C=" << format_double(spec.c) << ";noise=" << format_double(spec.noise_std)
     << ";placement=" << spec.placement.random << ',' << format_double(spec.placement.half_extent)
     << ',' << format_double(spec.placement.max_separation) << ','
     << format_double(spec.placement.alpha);
  for (const auto& s : spec.placement.fixed.sources) {
    os << ',' << format_double(s.x) << ',' << format_double(s.y) << ',' << format_double(s.alpha);
  }
  const auto& cc = spec.completion;
  os << ";completion=" << format_double(cc.epsilon) << ',' << static_cast<int>(cc.epsilon_mode)
     << ',' << cc.max_iters << ',' << format_double(cc.rel_tol) << ','
     << format_double(cc.lambda_decay);
  os << ";dual=" << spec.dual.smoothing << ',' << format_double(spec.dual.tol) << ','
     << static_cast<int>(spec.dual.resampling) << ','
     << format_double(spec.dual.contrast_threshold);
  os << ";C_mu=" << format_double(spec.c_mu) << ";C_e=" << format_double(spec.c_e);
  return os.str();
}

inline std::uint64_t spec_hash(const ExperimentSpec& spec) { return detail::fnv1a(describe(spec)); }

/// One trial: sources depend on (base_seed, trial); samples additionally on M.
inline detail::TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t m,
                                      std::size_t trial) {
  detail::TrialOutcome out;
  const std::uint64_t trial_seed = derive_seed(spec.base_seed, trial);
  try {
    const SourceConfig cfg = detail::place_sources(spec, derive_seed(trial_seed, 0));
    const Region region(spec.side);
    const SampleSet samples = draw_samples(region, cfg, spec.model, m,
                                           derive_seed(trial_seed, 1 + m), spec.noise_std);
    const Point naive = naive_localize(samples);
    out.naive = std::numeric_limits<double>::infinity();
    for (const auto& s : cfg.sources) {
      out.naive = std::min(out.naive, (naive.x - s.x) * (naive.x - s.x) +
                                          (naive.y - s.y) * (naive.y - s.y));
    }
    const GridSpec grid(select_grid_dim(m, spec.c), spec.side);
    const auto completed = complete(build_observation(samples, grid), spec.completion);
    out.converged = completed.converged;
    if (spec.scenario == Scenario::kSingleSource) {
      const auto est = localize_single(completed.values, grid);
      const auto& s = cfg.sources.front();
      out.proposed = (est.x - s.x) * (est.x - s.x) + (est.y - s.y) * (est.y - s.y);
    } else {
      const auto est = localize_double(completed.values, grid, spec.dual);
      out.proposed = paired_squared_error(est.positions, cfg);
    }
    out.ok = std::isfinite(out.proposed) && std::isfinite(out.naive);
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

/// Progress callback: (finished tasks, total tasks).
using Progress = std::function<void(std::size_t, std::size_t)>;

/// Runs every (M, trial) task on up to `jobs` threads (0 = hardware
/// concurrency). Each task writes its own slot and aggregation walks the
/// slots in trial order, so results do not depend on `jobs`.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t jobs = 1,
                                       const Progress& progress = {}) {
  spec.validate();
  const std::size_t per_m = spec.trials;
  const std::size_t total = spec.m_list.size() * per_m;
  std::vector<detail::TrialOutcome> slots(total);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex report_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      slots[task] = run_trial(spec, spec.m_list[task / per_m], task % per_m);
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(report_mutex);
        progress(finished, total);
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, total);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const auto bounds =
      bound_curve(spec.model, spec.side, spec.c, spec.c_mu, spec.c_e, spec.m_list);
  ExperimentResult result;
  result.base_seed = spec.base_seed;
  result.spec_hash = spec_hash(spec);
  for (std::size_t k = 0; k < spec.m_list.size(); ++k) {
    ExperimentRecord rec;
    rec.m = spec.m_list[k];
    rec.n_c = bounds[k].n_c;
    rec.bound = spec.model.family() == ModelFamily::kGaussian ? bounds[k].corollary
                                                               : bounds[k].theorem;
    std::vector<double> prop, naive;
    double sum_p = 0.0, sum_n = 0.0;
    for (std::size_t t = 0; t < per_m; ++t) {
      const auto& o = slots[k * per_m + t];
      if (!o.ok) {
        ++rec.trials_failed;
        continue;
      }
      ++rec.trials_ok;
      if (!o.converged) ++rec.completion_not_converged;
      sum_p += o.proposed;
      sum_n += o.naive;
      prop.push_back(o.proposed);
      naive.push_back(o.naive);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto ok = static_cast<double>(rec.trials_ok);
    rec.mse_proposed = rec.trials_ok ? sum_p / ok : nan;
    rec.mse_naive = rec.trials_ok ? sum_n / ok : nan;
    rec.median_proposed = detail::median(std::move(prop));
    rec.median_naive = detail::median(std::move(naive));
    result.records.push_back(rec);
  }
  return result;
}

/// CSV with header M,n_c,mse_proposed,mse_naive,bound,trials_ok,trials_failed.
inline void write_result_csv(std::ostream& out, const ExperimentResult& result) {
  out << "M,n_c,mse_proposed,mse_naive,bound,trials_ok,trials_failed\n";
  for (const auto& r : result.records) {
    out << r.m << ',' << r.n_c << ',' << format_double(r.mse_proposed) << ','
        << format_double(r.mse_naive) << ',' << format_double(r.bound) << ',' << r.trials_ok
        << ',' << r.trials_failed << '\n';
  }
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope fit needs two or more matching points");
  }
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace eigloc
