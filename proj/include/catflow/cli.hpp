// Copyright 2026 The Catflow Authors
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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "catflow/evolve.hpp"
#include "catflow/model.hpp"

namespace catflow::cli {

enum class Experiment {
  Simulate,
  SweepKappa,
  DensityCheck,
  LyapunovCheck,
  AdiabaticCompare,
  BlockCheck,
  NsWitness
};

std::string_view to_string(Experiment e);
std::optional<Experiment> experiment_from_string(std::string_view s);
const std::vector<std::string>& experiment_names();

struct InitialStateSpec {
  enum class Kind { Fock, Coherent, CatPerturbed };
  Kind kind = Kind::Fock;
  int n = 1;
  int m = 0;
  Complex z{0.0, 0.0};
  double epsilon = 0.1;
};

struct SweepSettings {
  std::vector<double> kappas;
};

struct DensitySettings {
  int budget = 30;
  /// 0 selects na - 2k (resp. nb - 2).
  int interior_na = 0;
  int interior_nb = 0;
  int single_mode_budget = 2;
  /// 0 selects na - 2k.
  int single_mode_interior = 0;
  double threshold = 1e-8;
};

struct LyapunovSettings {
  std::vector<double> mu_grid{0.0, 0.01, 0.05, 0.1, 0.2, 0.5};
  double c2_min = 0.01;
  double c2_max = 10.0;
  int c2_count = 31;
  /// 0 selects 2k.
  int interior_margin = 0;
};

struct BlockSettings {
  std::vector<double> times{0.5, 1.0, 2.0};
};

struct WitnessSettings {
  int ambient_dim = 30;
  int zero_order = 0;
};

struct RunConfig {
  Experiment experiment = Experiment::Simulate;
  ModelParams model;
  IntegratorConfig integrator;
  InitialStateSpec initial_state;
  std::string output_dir;
  std::uint64_t seed = 0;
  SweepSettings sweep;
  DensitySettings density;
  LyapunovSettings lyapunov;
  BlockSettings block;
  WitnessSettings witness;

  /// Every field, defaults included.
  nlohmann::json to_json() const;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return config.has_value(); }
};

/// Validates a JSON document; all problems are collected.
ParseResult parse_config(const nlohmann::json& doc);
ParseResult parse_config(const std::string& text);

/// Applies "dotted.key=value" to the document; the value is read as JSON
/// when it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

DensityMatrix make_initial_state(const RunConfig& cfg, const CatModel& model);
/// Mode-a part of the initial state (the buffer must start in vacuum).
DensityMatrix make_initial_mode_a_state(const RunConfig& cfg);

/// From CATFLOW_WORKERS, else the available parallelism.
int worker_count();

/// Runs the experiment and writes its artifacts; returns the exit status.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace catflow::cli
