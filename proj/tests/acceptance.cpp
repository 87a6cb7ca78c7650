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

// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "eigloc.hpp"
#include "oracles.hpp"

namespace {

using namespace eigloc;

constexpr std::uint64_t kSingleSeed = 20260101;
constexpr std::uint64_t kDoubleSeed = 20260102;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void print_records(const ExperimentResult& r, Outcome& out) {
  out.details.push_back("M      n_c  mse_proposed  mse_naive    median_prop  bound        ok/failed");
  for (const auto& rec : r.records) {
    out.details.push_back(fmt("%-6zu %-4zu %-13.6g %-12.6g %-12.6g %-12.6g %zu/%zu", rec.m,
                              rec.n_c, rec.mse_proposed, rec.mse_naive, rec.median_proposed,
                              rec.bound, rec.trials_ok, rec.trials_failed));
  }
}

// Shared by the single-source slope and bound criteria.
const ExperimentResult& single_sweep() {
  static const ExperimentResult result = [] {
    ExperimentSpec spec;
    spec.scenario = Scenario::kSingleSource;
    spec.m_list = {100, 200, 400, 800, 1600, 3200};
    spec.trials = 200;
    spec.base_seed = kSingleSeed;
    return run_experiment(spec, 0);
  }();
  return result;
}

Outcome single_source_rates() {
  const auto& r = single_sweep();
  std::vector<double> ms, prop, naive;
  for (const auto& rec : r.records) {
    ms.push_back(static_cast<double>(rec.m));
    prop.push_back(rec.mse_proposed);
    naive.push_back(rec.mse_naive);
  }
  const double s_naive = loglog_slope(ms, naive);
  const double s_prop = loglog_slope(ms, prop);
  const auto& at200 = r.records[1];
  const double ratio = at200.mse_proposed / at200.mse_naive;
  Outcome out;
  const bool a = std::abs(s_naive + 1.0) <= 0.3;
  const bool b = s_prop <= s_naive - 0.2;
  const bool c = ratio <= 0.5;
  out.pass = a && b && c;
  out.summary = fmt("naive slope %.3f, proposed slope %.3f, MSE ratio at M=200 %.3f", s_naive,
                    s_prop, ratio);
  out.details.push_back(fmt("naive slope within -1 +/- 0.3: %s", a ? "yes" : "no"));
  out.details.push_back(fmt("proposed at least 0.2 steeper: %s", b ? "yes" : "no"));
  out.details.push_back(fmt("proposed <= half of naive at M=200: %s", c ? "yes" : "no"));
  print_records(r, out);
  return out;
}

Outcome double_source_rates() {
  ExperimentSpec spec;
  spec.scenario = Scenario::kDoubleSource;
  spec.m_list = {500, 1000, 2000};
  spec.trials = 200;
  spec.base_seed = kDoubleSeed;
  const auto r = run_experiment(spec, 0);
  const double naive_ratio = r.records[2].mse_naive / r.records[0].mse_naive;
  const double prop_ratio = r.records[2].mse_proposed / r.records[0].mse_proposed;
  Outcome out;
  out.pass = naive_ratio >= 0.8 && prop_ratio <= 0.5;
  out.summary = fmt("naive MSE(2000)/MSE(500) = %.3f (need >= 0.8), proposed = %.3f (need <= 0.5)",
                    naive_ratio, prop_ratio);
  print_records(r, out);
  std::size_t lost = 0;
  for (const auto& rec : r.records) lost += rec.completion_not_converged;
  out.details.push_back(fmt("completion runs not converged: %zu", lost));
  return out;
}

Outcome median_below_bound() {
  const auto& r = single_sweep();
  Outcome out;
  out.pass = true;
  for (const auto& rec : r.records) {
    if (rec.m < 400) continue;
    const bool ok = rec.median_proposed <= rec.bound;
    out.pass = out.pass && ok;
    out.details.push_back(fmt("M=%zu median %.4g vs bound %.4g: %s", rec.m, rec.median_proposed,
                              rec.bound, ok ? "ok" : "exceeds"));
  }
  out.summary = "median squared error against L^6 / n^3 for M >= 400";
  return out;
}

Outcome autocorrelation_checks() {
  const std::vector<std::pair<std::string, CharacteristicModel>> models = {
      {"gaussian 5", CharacteristicModel::gaussian(5.0)},
      {"gaussian 20", CharacteristicModel::gaussian(20.0)},
      {"laplacian 1", CharacteristicModel::laplacian(1.0)},
      {"laplacian 5", CharacteristicModel::laplacian(5.0)}};
  Outcome out;
  out.pass = true;
  for (const auto& [name, model] : models) {
    bool decreasing = true;
    double prev = autocorrelation(model, 0.0);
    for (int k = 1; k <= 2000; ++k) {
      const double v = autocorrelation(model, 1e-3 * k);
      decreasing = decreasing && v < prev;
      prev = v;
    }
    // Integrate far enough out that the tails are negligible.
    const double reach = 40.0 / std::sqrt(model.gamma()) + 40.0 / model.gamma();
    double worst = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double t = 0.05 * k;
      std::function<double(double)> f = [&](double x) { return model(x) * model(x - t); };
      const double quad = model.family() == ModelFamily::kLaplacian
                              ? testing::simpson(f, -reach, 0.0, 40000) +
                                    testing::simpson(f, 0.0, t, 2000) +
                                    testing::simpson(f, t, reach, 40000)
                              : testing::simpson(f, -reach, reach, 40000);
      worst = std::max(worst, std::abs(quad - autocorrelation(model, t)));
    }
    const bool ok = decreasing && worst <= 1e-6;
    out.pass = out.pass && ok;
    out.details.push_back(fmt("%-12s strictly decreasing: %s, max |closed form - quadrature| %.2e",
                              name.c_str(), decreasing ? "yes" : "no", worst));
  }
  out.summary = "autocorrelation monotone on (0, 2] and matching quadrature";
  return out;
}

SourceConfig random_pair(Rng& rng, double half, double max_sep) {
  for (;;) {
    Source a{rng.uniform(-half, half), rng.uniform(-half, half), 1.0};
    Source b{rng.uniform(-half, half), rng.uniform(-half, half), 1.0};
    if (std::hypot(a.x - b.x, a.y - b.y) <= max_sep) return SourceConfig{{a, b}};
  }
}

Outcome rotation_unimodality() {
  const auto model = CharacteristicModel::gaussian(20.0);
  const GridSpec grid(128, 2.0);
  const double step = degrees(0.5);
  const double tol = degrees(0.5);
  const auto mode = Resampling::kBicubic;
  Rng rng(derive_seed(kDoubleSeed, 5));
  int unimodal = 0, unimodal_inner = 0, found = 0, aligned = 0;
  double worst_rho = 1.0, worst_gap = 0.0;
  const int configs = 20;
  for (int k = 0; k < configs; ++k) {
    const auto cfg = random_pair(rng, 0.5, 0.5);
    const auto& s = cfg.sources;
    double truth = std::atan2(s[1].y - s[0].y, s[1].x - s[0].x);
    truth = std::fmod(std::fmod(truth, kHalfPi) + kHalfPi, kHalfPi);
    const auto h = ideal_matrix(cfg, model, grid);
    const auto scan = rho_scan(h, grid, step, mode);
    std::vector<std::pair<double, double>> window, inner;
    for (std::size_t i = 0; i + 1 < scan.thetas.size(); ++i) {  // pi/2 repeats 0
      const double d = std::remainder(scan.thetas[i] - truth, kHalfPi);
      if (std::abs(d) < degrees(45.0)) window.emplace_back(d, scan.rhos[i]);
      if (std::abs(d) <= degrees(40.0)) inner.emplace_back(d, scan.rhos[i]);
    }
    auto changes = [](std::vector<std::pair<double, double>> w) {
      std::sort(w.begin(), w.end());
      std::vector<double> seq;
      for (const auto& p : w) seq.push_back(p.second);
      return testing::sign_changes(seq);
    };
    const int c_full = changes(window), c_inner = changes(inner);
    unimodal += c_full == 1;
    unimodal_inner += c_inner == 1;

    const auto search = find_rotation(h, grid, 5, tol, mode);
    const double gap = angle_gap(search.theta_star, scan.theta_star);
    worst_gap = std::max(worst_gap, gap);
    found += gap <= std::max(tol, step) + 1e-12;

    const double rho = alignment_ratio(rotate_observation(h, grid, truth, mode));
    worst_rho = std::min(worst_rho, rho);
    aligned += rho >= 0.98;
  }
  Outcome out;
  out.pass = unimodal == configs && found == configs && aligned == configs;
  out.summary = fmt("unimodal %d/%d, search agrees with scan %d/%d, rho at true axis >= 0.98 %d/%d",
                    unimodal, configs, found, configs, aligned, configs);
  out.details.push_back(fmt("unimodal within +/-40 degrees of the true axis: %d/%d", unimodal_inner,
                            configs));
  out.details.push_back(fmt("largest search/scan gap %.3f deg, smallest rho at true axis %.4f",
                            worst_gap * 180.0 / std::numbers::pi, worst_rho));
  out.details.push_back("grid n=128 (rotated n'=90), bicubic resampling, 0.5 degree scan step");
  return out;
}

Outcome two_source_svd() {
  const auto model = CharacteristicModel::gaussian(20.0);
  Rng rng(derive_seed(kDoubleSeed, 6));
  double rec = 0.0, orth = 0.0, sv = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GridSpec grid(32, 2.0);
    const auto cfg = random_pair(rng, 0.5, 1.0);
    const auto h = two_source_matrix(model, cfg, grid);
    const auto ideal = ideal_svd_two_source(model, cfg, grid);
    const Eigen::MatrixXd rebuilt = ideal.alpha1 * ideal.p1 * ideal.q1.transpose() +
                                    ideal.alpha2 * ideal.p2 * ideal.q2.transpose();
    rec = std::max(rec, (rebuilt - h).norm() / h.norm());
    orth = std::max({orth, std::abs(ideal.p1.dot(ideal.p2)), std::abs(ideal.q1.dot(ideal.q2))});
    const auto svd = svd_top(h, 2);
    sv = std::max({sv, std::abs(svd.singular_values(0) - std::max(ideal.alpha1, ideal.alpha2)),
                   std::abs(svd.singular_values(1) - std::min(ideal.alpha1, ideal.alpha2))});
  }
  Outcome out;
  out.pass = rec <= 1e-10 && orth <= 1e-12 && sv <= 1e-8;
  out.summary = fmt("reconstruction %.2e, orthogonality %.2e, singular values %.2e (20 configs)",
                    rec, orth, sv);
  return out;
}

Outcome rank_one_completion() {
  const std::size_t n = 30;
  const auto m = static_cast<std::size_t>(std::ceil(3.0 * n * std::pow(std::log(double(n)), 2)));
  CompletionConfig cfg;
  cfg.epsilon = 0.0;
  cfg.epsilon_mode = EpsilonMode::kExplicit;
  cfg.max_iters = 3000;
  std::vector<double> errors;
  double equivariance = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(derive_seed(kSingleSeed, 100 + seed));
    Eigen::VectorXd u(30), v(30);
    for (Eigen::Index i = 0; i < 30; ++i) {
      u(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) / std::sqrt(30.0);
      v(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) / std::sqrt(30.0);
    }
    const Eigen::MatrixXd truth = u * v.transpose();
    ObservationMatrix obs(GridSpec(n, 1.0));
    for (std::size_t k = 0; k < m; ++k) {
      const auto i = static_cast<Eigen::Index>(rng.uniform() * n);
      const auto j = static_cast<Eigen::Index>(rng.uniform() * n);
      if (obs.mask(i, j)) continue;
      obs.mask(i, j) = true;
      obs.values(i, j) = truth(i, j);
      obs.omega.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    const auto done = complete(obs, cfg);
    errors.push_back((done.values - truth).norm() / truth.norm());
    if (seed < 3) {
      auto scaled = obs;
      scaled.values *= 7.5;
      const auto again = complete(scaled, cfg);
      equivariance = std::max(equivariance, (again.values - 7.5 * done.values).norm() /
                                                (7.5 * done.values.norm()));
    }
  }
  const double med = testing::median(errors);
  Outcome out;
  out.pass = med < 1e-2 && equivariance <= 1e-6;
  out.summary = fmt("median relative error %.2e over 20 seeds (M=%zu), scaling deviation %.2e",
                    med, m, equivariance);
  return out;
}

Outcome close_pair_separation() {
  const auto model = CharacteristicModel::gaussian(20.0);
  const GridSpec grid(32, 2.0);
  const double half = 0.075;
  const SourceConfig truth{{Source{-half, 0.1, 1.0}, Source{half, 0.1, 1.0}}};
  const auto h = ideal_matrix(truth, model, grid);
  const auto svd = svd_top(h, 1);
  std::vector<double> u(svd.left.col(0).data(), svd.left.col(0).data() + svd.left.rows());
  const auto lobes = testing::peaks(u).size();
  const auto est = localize_double(h, grid);
  const double gap = std::abs(est.d_hat - half);

  // Raw early-gate score on the same profiles, for comparison.
  const auto coords = grid.centers();
  const auto along = make_regression(coords, svd.left.col(0));
  const auto across = make_regression(coords, svd.right.col(0)).shifted(-est.y_hat);
  const auto raw = maximize_scan_golden(
      [&](double d) { return q_metric(along, across, est.c_hat, d); }, 0.0, 1.0,
      grid.cell() / 10.0, grid.cell() / 1000.0);

  Outcome out;
  out.pass = lobes == 1 && gap <= 2.0 * grid.cell();
  out.summary = fmt("peaks in leading vector %zu, half-separation %.4f vs %.4f (|err| %.4f, "
                    "limit %.4f)",
                    lobes, est.d_hat, half, gap, 2.0 * grid.cell());
  out.details.push_back(fmt("unnormalized score maximizer %.4f", raw.arg));
  return out;
}

Outcome determinism() {
  ExperimentSpec spec;
  spec.scenario = Scenario::kDoubleSource;
  spec.m_list = {300, 600};
  spec.trials = 8;
  spec.base_seed = 77;
  const auto ref = run_experiment(spec, 1);
  bool same = true;
  for (std::size_t jobs : {1u, 2u, 4u}) {
    const auto r = run_experiment(spec, jobs);
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      same = same && r.records[k].mse_proposed == ref.records[k].mse_proposed &&
             r.records[k].mse_naive == ref.records[k].mse_naive &&
             r.records[k].trials_ok == ref.records[k].trials_ok;
    }
    same = same && r.spec_hash == ref.spec_hash;
  }
  Outcome out;
  out.pass = same;
  out.summary = "repeated runs with 1, 2 and 4 workers give identical records";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"single-source error rates", single_source_rates},
      {"double-source error rates", double_source_rates},
      {"median within error bound", median_below_bound},
      {"autocorrelation properties", autocorrelation_checks},
      {"rotation ratio unimodality", rotation_unimodality},
      {"two-source closed-form SVD", two_source_svd},
      {"rank-one completion", rank_one_completion},
      {"close-pair separation", close_pair_separation},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.summary = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !out.pass;
    std::printf("[%s] criterion %zu (%s): %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), out.summary.c_str(), secs);
    for (const auto& d : out.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
