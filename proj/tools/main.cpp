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

// eigloc command-line tool: simulate, localize, sweep, rho-scan.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "config.hpp"
#include "eigloc.hpp"

#ifndef EIGLOC_VERSION
#define EIGLOC_VERSION "0.0.0"
#endif

namespace {

using eigloc::Error;
using eigloc::ErrorCategory;
using eigloc::ErrorCode;
using eigloc::cli::RunConfig;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return kExitConfig;
    case ErrorCategory::kData: return kExitData;
    case ErrorCategory::kNumerical: return kExitNumerical;
  }
  return kExitNumerical;
}

std::string category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kData: return "data";
    case ErrorCategory::kNumerical: return "numerical";
  }
  return "numerical";
}

int report_error(const std::string& code, ErrorCategory category, const std::string& message,
                 std::optional<std::size_t> line = std::nullopt) {
  json err = {{"code", code}, {"category", category_name(category)}, {"message", message}};
  if (line) err["line"] = *line;
  std::cout << json{{"status", "error"}, {"error", err}}.dump() << std::endl;
  std::cerr << "eigloc: " << message << '\n';
  return exit_code(category);
}

json versions() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  return {{"eigloc", EIGLOC_VERSION},
          {"eigen", eigen.str()},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

/// Writes `<path>.meta.json` holding the resolved config and run details.
void write_sidecar(const std::string& path, const std::string& command, const RunConfig& cfg,
                   json extra) {
  json meta = {{"command", command},
               {"seed", cfg.seed},
               {"config", eigloc::cli::to_json(cfg)},
               {"versions", versions()}};
  for (auto& [k, v] : extra.items()) meta[k] = v;
  const std::string meta_path = path + ".meta.json";
  auto out = open_output(meta_path);
  out << meta.dump(2) << '\n';
  finish_output(out, meta_path);
}

json sources_json(const eigloc::SourceConfig& cfg) {
  json arr = json::array();
  for (const auto& s : cfg.sources) arr.push_back({{"x", s.x}, {"y", s.y}, {"alpha", s.alpha}});
  return arr;
}

eigloc::SampleSet read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open samples file " + path);
  return eigloc::read_samples_csv(in);
}

std::size_t grid_dim(const RunConfig& cfg, std::size_t count) {
  return cfg.grid_n ? *cfg.grid_n : eigloc::select_grid_dim(count, cfg.c);
}

struct Completed {
  eigloc::GridSpec grid;
  eigloc::CompletedMatrix matrix;
};

Completed complete_samples(const RunConfig& cfg, const eigloc::CharacteristicModel& model,
                           const eigloc::SampleSet& samples) {
  const eigloc::GridSpec grid(grid_dim(cfg, samples.size()), cfg.side);
  auto cc = cfg.completion;
  if (cc.epsilon_mode == eigloc::EpsilonMode::kTheoreticalBound) {
    cc.epsilon = eigloc::sampling_error_bound(model, cfg.placement.alpha, cfg.side, grid.n(),
                                              samples.size());
  }
  return {grid, eigloc::complete(eigloc::build_observation(samples, grid), cc)};
}

json completion_json(const eigloc::CompletedMatrix& m) {
  return {{"iterations", m.iterations_used}, {"residual", m.residual},
          {"tolerance", m.tolerance},        {"threshold", m.threshold},
          {"converged", m.converged}};
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_path) {
  const auto spec = eigloc::cli::to_spec(cfg);
  const auto sources = eigloc::detail::place_sources(spec, eigloc::derive_seed(cfg.seed, 0));
  const auto samples = eigloc::draw_samples(eigloc::Region(cfg.side), sources, spec.model,
                                            cfg.samples, eigloc::derive_seed(cfg.seed, 1),
                                            cfg.noise_std);
  auto out = open_output(out_path);
  eigloc::write_samples_csv(out, samples);
  finish_output(out, out_path);
  RunConfig resolved = cfg;
  resolved.sources = sources;
  write_sidecar(out_path, "simulate", resolved,
                {{"output", out_path}, {"sources", sources_json(sources)}});
  std::cout << json{{"status", "ok"}, {"samples", samples.size()}, {"output", out_path}}.dump()
            << std::endl;
  return 0;
}

int cmd_localize(const RunConfig& cfg, const std::string& input, const std::string& out_path) {
  const auto model = eigloc::cli::build_model(cfg);
  const auto samples = read_samples(input);
  const auto done = complete_samples(cfg, model, samples);
  json report = {{"status", "ok"},
                 {"input", input},
                 {"samples", samples.size()},
                 {"grid_n", done.grid.n()},
                 {"source_count", cfg.source_count()},
                 {"completion", completion_json(done.matrix)}};
  json warnings = done.matrix.warnings;
  if (cfg.scenario == eigloc::Scenario::kSingleSource) {
    const auto est = eigloc::localize_single(done.matrix.values, done.grid);
    report["positions"] = json::array({{{"x", est.x}, {"y", est.y}}});
    report["diagnostics"] = {{"t_x", est.t_x},
                             {"t_y", est.t_y},
                             {"singular_values", vector_json(est.singular_values)}};
  } else {
    const auto est = eigloc::localize_double(done.matrix.values, done.grid, cfg.dual);
    json pos = json::array();
    for (const auto& p : est.positions) pos.push_back({{"x", p.x}, {"y", p.y}});
    report["positions"] = pos;
    report["theta_star_rad"] = est.theta_star;
    report["theta_star_deg"] = est.theta_star * 180.0 / std::numbers::pi;
    report["diagnostics"] = {
        {"rho_star", est.rho_star},
        {"contrast", est.contrast},
        {"low_contrast", est.low_contrast},
        {"c_hat", est.c_hat},
        {"d_hat", est.d_hat},
        {"y_hat", est.y_hat},
        {"aligned_axis", est.aligned_axis == eigloc::AlignedAxis::kX ? "x" : "y"},
        {"singular_values", vector_json(est.singular_values)}};
    for (const auto& w : est.warnings) warnings.push_back(w);
  }
  report["warnings"] = warnings;
  if (out_path.empty()) {
    std::cout << report.dump(2) << std::endl;
    return 0;
  }
  auto out = open_output(out_path);
  out << report.dump(2) << '\n';
  finish_output(out, out_path);
  write_sidecar(out_path, "localize", cfg, {{"input", input}, {"output", out_path}});
  std::cout << json{{"status", "ok"}, {"output", out_path}}.dump() << std::endl;
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_path, std::size_t jobs) {
  const auto spec = eigloc::cli::to_spec(cfg);
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("sweep: ") + e.what());
  }
  std::size_t last_pct = 101;
  const auto result = eigloc::run_experiment(spec, jobs, [&](std::size_t done, std::size_t total) {
    const std::size_t pct = 100 * done / total;
    if (pct != last_pct) {
      last_pct = pct;
      std::cerr << "\rsweep: " << done << '/' << total << " trials (" << pct << "%)"
                << (done == total ? "\n" : "") << std::flush;
    }
  });
  auto out = open_output(out_path);
  eigloc::write_result_csv(out, result);
  finish_output(out, out_path);

  const auto bounds =
      eigloc::bound_curve(spec.model, spec.side, spec.c, spec.c_mu, spec.c_e, spec.m_list);
  json records = json::array();
  for (std::size_t k = 0; k < result.records.size(); ++k) {
    const auto& r = result.records[k];
    records.push_back({{"M", r.m},
                       {"n_c", r.n_c},
                       {"mse_proposed", r.mse_proposed},
                       {"mse_naive", r.mse_naive},
                       {"median_proposed", r.median_proposed},
                       {"median_naive", r.median_naive},
                       {"bound_corollary", bounds[k].corollary},
                       {"bound_theorem", bounds[k].theorem},
                       {"trials_ok", r.trials_ok},
                       {"trials_failed", r.trials_failed},
                       {"completion_not_converged", r.completion_not_converged}});
  }
  std::ostringstream hash;
  hash << std::hex << result.spec_hash;
  write_sidecar(out_path, "sweep", cfg,
                {{"output", out_path}, {"spec_hash", hash.str()}, {"records", records}});
  std::cout << json{{"status", "ok"}, {"output", out_path}, {"spec_hash", hash.str()}}.dump()
            << std::endl;
  return 0;
}

int cmd_rho_scan(const RunConfig& cfg, const std::string& input, const std::string& out_path) {
  const auto model = eigloc::cli::build_model(cfg);
  const auto samples = read_samples(input);
  const auto done = complete_samples(cfg, model, samples);
  const auto scan = eigloc::rho_scan(done.matrix.values, done.grid,
                                     eigloc::degrees(cfg.scan_step_deg), cfg.dual.resampling);
  auto out = open_output(out_path);
  eigloc::write_scan_csv(out, scan);
  finish_output(out, out_path);
  write_sidecar(out_path, "rho-scan", cfg,
                {{"input", input},
                 {"output", out_path},
                 {"theta_star_rad", scan.theta_star},
                 {"rho_star", scan.rho_star},
                 {"contrast", scan.contrast()},
                 {"completion", completion_json(done.matrix)}});
  std::cout << json{{"status", "ok"}, {"output", out_path}, {"theta_star_rad", scan.theta_star},
                    {"rho_star", scan.rho_star}}
                   .dump()
            << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localize one or two energy sources from scattered power samples."};
  app.set_version_flag("--version", std::string(EIGLOC_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string input;
  std::size_t jobs = 1;
  std::optional<std::size_t> source_count;

  auto common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Base seed (overrides the config)");
    auto* out = sub->add_option("--out", out_path, "Output file");
    if (out_required) out->required();
  };
  auto* simulate = app.add_subcommand("simulate", "Draw power samples, write x,y,h CSV");
  common(simulate, true);
  auto* localize = app.add_subcommand("localize", "Estimate source positions from a sample CSV");
  common(localize, false);
  localize->add_option("samples", input, "Sample CSV (x,y,h)")->required();
  localize->add_option("--sources", source_count, "Number of sources (1 or 2)")
      ->check(CLI::Range(1, 2));
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo MSE sweep over sample counts");
  common(sweep, true);
  sweep->add_option("--jobs", jobs, "Worker threads (0 = all cores)");
  auto* scan = app.add_subcommand("rho-scan", "Alignment ratio over rotation angles");
  common(scan, true);
  scan->add_option("samples", input, "Sample CSV (x,y,h)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", ErrorCategory::kConfig, e.what());
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : eigloc::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (source_count) {
      cfg.scenario =
          *source_count == 1 ? eigloc::Scenario::kSingleSource : eigloc::Scenario::kDoubleSource;
    }
    eigloc::cli::validate(cfg);

    if (simulate->parsed()) return cmd_simulate(cfg, out_path);
    if (localize->parsed()) return cmd_localize(cfg, input, out_path);
    if (sweep->parsed()) return cmd_sweep(cfg, out_path, jobs);
    return cmd_rho_scan(cfg, input, out_path);
  } catch (const eigloc::ParseError& e) {
    return report_error(std::string(eigloc::to_string(e.code())), e.category(), e.what(),
                        e.line());
  } catch (const Error& e) {
    return report_error(std::string(eigloc::to_string(e.code())), e.category(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", ErrorCategory::kNumerical, e.what());
  }
}
