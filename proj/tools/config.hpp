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

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eigloc.hpp"

namespace eigloc::cli {

using nlohmann::json;

/// Everything a command needs, resolved from the JSON config and flags.
struct RunConfig {
  Scenario scenario = Scenario::kSingleSource;
  double side = 2.0;
  std::string model_family = "gaussian";
  double gamma = 20.0;
  std::string model_table;  // CSV path, tabulated family only
  SourceConfig sources;     // empty: random placement
  Placement placement;
  std::size_t samples = 200;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  double c = 1.0;
  std::optional<std::size_t> grid_n;
  CompletionConfig completion;
  DualOptions dual;
  double scan_step_deg = 0.5;
  std::vector<std::size_t> m_list{100, 200, 400, 800, 1600, 3200};
  std::size_t trials = 200;
  double c_mu = 1.0;
  double c_e = 1.0;

  std::size_t source_count() const { return scenario == Scenario::kSingleSource ? 1 : 2; }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfig, (path.empty() ? std::string("config") : path) + ": " + what);
}

// Walks one JSON object, type-checking reads and rejecting unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error(path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) config_error(sub(key), "expected a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    return as_count(j_.at(key), sub(key));
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) config_error(sub(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback,
                   const std::vector<std::string>& allowed = {}) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) config_error(sub(key), "expected a string");
    auto s = v.get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      config_error(sub(key), "must be one of: " + list);
    }
    return s;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) config_error(sub(key), "unknown key");
    }
  }

  static std::size_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) config_error(path, "must be nonnegative");
      return static_cast<std::size_t>(v.get<std::int64_t>());
    }
    config_error(path, "expected a nonnegative integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Resampling parse_resampling(const std::string& s) {
  if (s == "bilinear") return Resampling::kBilinear;
  if (s == "bicubic") return Resampling::kBicubic;
  return Resampling::kNearest;
}

inline std::string resampling_name(Resampling r) {
  switch (r) {
    case Resampling::kBilinear: return "bilinear";
    case Resampling::kBicubic: return "bicubic";
    case Resampling::kNearest: break;
  }
  return "nearest";
}

inline EpsilonMode parse_epsilon_mode(const std::string& s) {
  if (s == "explicit") return EpsilonMode::kExplicit;
  if (s == "theoretical") return EpsilonMode::kTheoreticalBound;
  return EpsilonMode::kFractionOfObserved;
}

inline std::string epsilon_mode_name(EpsilonMode m) {
  switch (m) {
    case EpsilonMode::kExplicit: return "explicit";
    case EpsilonMode::kTheoreticalBound: return "theoretical";
    case EpsilonMode::kFractionOfObserved: break;
  }
  return "fraction";
}

}  // namespace detail

/// Builds a RunConfig from JSON. Any unknown key, wrong type or
/// out-of-range value throws a config error naming the offending path.
inline RunConfig parse_config(const json& root) {
  using detail::ObjectReader;
  RunConfig cfg;
  ObjectReader top(root, "");
  cfg.scenario = top.text("scenario", "single", {"single", "double"}) == "single"
                     ? Scenario::kSingleSource
                     : Scenario::kDoubleSource;
  cfg.side = top.number("region_side", cfg.side);
  if (top.has("seed")) {
    cfg.seed = static_cast<std::uint64_t>(ObjectReader::as_count(top.at("seed"), "seed"));
  }
  cfg.samples = top.count("samples", cfg.samples);
  cfg.noise_std = top.number("noise_std", cfg.noise_std);

  if (top.has("model")) {
    ObjectReader m(top.at("model"), "model");
    cfg.model_family = m.text("family", cfg.model_family, {"gaussian", "laplacian", "tabulated"});
    cfg.gamma = m.number("gamma", cfg.gamma);
    cfg.model_table = m.text("table", "");
    m.finish();
  }

  if (top.has("sources")) {
    const auto& arr = top.at("sources");
    if (!arr.is_array()) detail::config_error("sources", "expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      ObjectReader s(arr[k], "sources[" + std::to_string(k) + "]");
      if (!s.has("x") || !s.has("y")) detail::config_error(s.sub(""), "x and y are required");
      Source src;
      src.x = s.number("x", 0.0);
      src.y = s.number("y", 0.0);
      src.alpha = s.number("alpha", 1.0);
      s.finish();
      cfg.sources.sources.push_back(src);
    }
  }

  if (top.has("placement")) {
    ObjectReader p(top.at("placement"), "placement");
    cfg.placement.half_extent = p.number("half_extent", cfg.placement.half_extent);
    cfg.placement.max_separation = p.number("max_separation", cfg.placement.max_separation);
    cfg.placement.alpha = p.number("alpha", cfg.placement.alpha);
    p.finish();
  }

  if (top.has("grid")) {
    ObjectReader g(top.at("grid"), "grid");
    cfg.c = g.number("c", cfg.c);
    if (g.has("n")) cfg.grid_n = g.count("n", 0);
    g.finish();
  }

  if (top.has("completion")) {
    ObjectReader c(top.at("completion"), "completion");
    auto& cc = cfg.completion;
    cc.epsilon = c.number("epsilon", cc.epsilon);
    cc.epsilon_mode = detail::parse_epsilon_mode(
        c.text("epsilon_mode", "fraction", {"fraction", "explicit", "theoretical"}));
    cc.max_iters = c.count("max_iters", cc.max_iters);
    cc.rel_tol = c.number("rel_tol", cc.rel_tol);
    cc.lambda_decay = c.number("lambda_decay", cc.lambda_decay);
    c.finish();
  }

  if (top.has("rotation")) {
    ObjectReader r(top.at("rotation"), "rotation");
    cfg.dual.smoothing = r.count("smoothing", cfg.dual.smoothing);
    cfg.dual.tol = degrees(r.number("tol_deg", 0.5));
    cfg.dual.resampling = detail::parse_resampling(
        r.text("resampling", "nearest", {"nearest", "bilinear", "bicubic"}));
    cfg.dual.contrast_threshold = r.number("contrast_threshold", cfg.dual.contrast_threshold);
    cfg.scan_step_deg = r.number("scan_step_deg", cfg.scan_step_deg);
    r.finish();
  }

  if (top.has("sweep")) {
    ObjectReader s(top.at("sweep"), "sweep");
    if (s.has("M")) {
      const auto& arr = s.at("M");
      if (!arr.is_array()) detail::config_error("sweep.M", "expected an array");
      cfg.m_list.clear();
      for (std::size_t k = 0; k < arr.size(); ++k) {
        cfg.m_list.push_back(
            ObjectReader::as_count(arr[k], "sweep.M[" + std::to_string(k) + "]"));
      }
    }
    cfg.trials = s.count("trials", cfg.trials);
    s.finish();
  }

  if (top.has("bound")) {
    ObjectReader b(top.at("bound"), "bound");
    cfg.c_mu = b.number("c_mu", cfg.c_mu);
    cfg.c_e = b.number("c_e", cfg.c_e);
    b.finish();
  }
  top.finish();
  return cfg;
}

inline json to_json(const RunConfig& cfg) {
  json sources = json::array();
  for (const auto& s : cfg.sources.sources) {
    sources.push_back({{"x", s.x}, {"y", s.y}, {"alpha", s.alpha}});
  }
  json model = {{"family", cfg.model_family}, {"gamma", cfg.gamma}};
  if (!cfg.model_table.empty()) model["table"] = cfg.model_table;
  json grid = {{"c", cfg.c}};
  if (cfg.grid_n) grid["n"] = *cfg.grid_n;
  json out = {
      {"scenario", std::string(to_string(cfg.scenario))},
      {"region_side", cfg.side},
      {"seed", cfg.seed},
      {"samples", cfg.samples},
      {"noise_std", cfg.noise_std},
      {"model", model},
      {"placement",
       {{"half_extent", cfg.placement.half_extent},
        {"max_separation", cfg.placement.max_separation},
        {"alpha", cfg.placement.alpha}}},
      {"grid", grid},
      {"completion",
       {{"epsilon", cfg.completion.epsilon},
        {"epsilon_mode", detail::epsilon_mode_name(cfg.completion.epsilon_mode)},
        {"max_iters", cfg.completion.max_iters},
        {"rel_tol", cfg.completion.rel_tol},
        {"lambda_decay", cfg.completion.lambda_decay}}},
      {"rotation",
       {{"smoothing", cfg.dual.smoothing},
        {"tol_deg", cfg.dual.tol * 180.0 / std::numbers::pi},
        {"resampling", detail::resampling_name(cfg.dual.resampling)},
        {"contrast_threshold", cfg.dual.contrast_threshold},
        {"scan_step_deg", cfg.scan_step_deg}}},
      {"sweep", {{"M", cfg.m_list}, {"trials", cfg.trials}}},
      {"bound", {{"c_mu", cfg.c_mu}, {"c_e", cfg.c_e}}},
  };
  if (!sources.empty()) out["sources"] = sources;
  return out;
}

inline CharacteristicModel build_model(const RunConfig& cfg) {
  try {
    if (cfg.model_family == "laplacian") return CharacteristicModel::laplacian(cfg.gamma);
    if (cfg.model_family == "tabulated") {
      if (cfg.model_table.empty()) {
        throw Error(ErrorCode::kConfig, "model.table: required for the tabulated family");
      }
      std::ifstream in(cfg.model_table);
      if (!in) throw Error(ErrorCode::kIo, "cannot open model table " + cfg.model_table);
      return CharacteristicModel::tabulated_csv(in);
    }
    return CharacteristicModel::gaussian(cfg.gamma);
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::kConfig) {
      throw Error(ErrorCode::kConfig, std::string("model: ") + e.what());
    }
    throw;
  }
}

/// Range checks that do not need input data. Throws config errors.
inline void validate(const RunConfig& cfg) {
  auto bad = [](const std::string& path, const std::string& what) {
    detail::config_error(path, what);
  };
  if (!(cfg.side > 0.0) || !std::isfinite(cfg.side)) bad("region_side", "must be positive");
  if (cfg.samples < 1) bad("samples", "must be >= 1");
  if (!(cfg.noise_std >= 0.0)) bad("noise_std", "must be nonnegative");
  if (!(cfg.c > 0.0)) bad("grid.c", "must be positive");
  if (cfg.grid_n && *cfg.grid_n < 2) bad("grid.n", "must be >= 2");
  if (!(cfg.scan_step_deg > 0.0) || cfg.scan_step_deg > 90.0) {
    bad("rotation.scan_step_deg", "must be in (0, 90]");
  }
  if (cfg.dual.smoothing < 1) bad("rotation.smoothing", "must be >= 1");
  if (!(cfg.dual.tol > 0.0)) bad("rotation.tol_deg", "must be positive");
  if (!(cfg.dual.contrast_threshold >= 0.0)) {
    bad("rotation.contrast_threshold", "must be nonnegative");
  }
  if (!cfg.sources.sources.empty()) {
    if (cfg.sources.size() != cfg.source_count()) {
      bad("sources", "scenario " + std::string(to_string(cfg.scenario)) + " needs exactly " +
                         std::to_string(cfg.source_count()) + " source(s)");
    }
    try {
      cfg.sources.validate(cfg.side);
    } catch (const Error& e) {
      bad("sources", e.what());
    }
  }
  try {
    cfg.completion.validate();
  } catch (const Error& e) {
    bad("completion", e.what());
  }
  (void)build_model(cfg);
}

inline ExperimentSpec to_spec(const RunConfig& cfg) {
  ExperimentSpec spec;
  spec.scenario = cfg.scenario;
  spec.m_list = cfg.m_list;
  spec.trials = cfg.trials;
  spec.base_seed = cfg.seed;
  spec.side = cfg.side;
  spec.model = build_model(cfg);
  spec.c = cfg.c;
  spec.noise_std = cfg.noise_std;
  spec.placement = cfg.placement;
  spec.placement.random = cfg.sources.sources.empty();
  spec.placement.fixed = cfg.sources;
  spec.completion = cfg.completion;
  spec.dual = cfg.dual;
  spec.c_mu = cfg.c_mu;
  spec.c_e = cfg.c_e;
  return spec;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, "config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(root);
}

}  // namespace eigloc::cli
