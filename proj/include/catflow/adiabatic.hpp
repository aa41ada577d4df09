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
// Strong-dissipation reduction of the bipartite model to
//
//   d rho^a/dt = kappa_tilde D[L](rho^a),   kappa_tilde = 4 / kappa,
//
// compared against the full dynamics through the lift rho^a (x) |0><0|.

#pragma once

#include <vector>

#include "catflow/evolve.hpp"
#include "catflow/model.hpp"

namespace catflow {

struct AdiabaticParams {
  double kappa_tilde = 4.0;
  ModelParams base;

  static AdiabaticParams from_model(const ModelParams& base);
  void validate() const;
};

/// kappa_tilde D[L] on mode a.
LindbladGenerator reduced_generator(const AdiabaticParams& params);

Trajectory reduced_evolve(const AdiabaticParams& params, const DensityMatrix& rho_a0,
                          const IntegratorConfig& cfg, const std::vector<Observer>& observers = {});

/// rho^a (x) |0><0| on the joint space.
DensityMatrix lift_to_joint(const DensityMatrix& rho_a, int nb);

struct AdiabaticComparison {
  std::vector<double> times;
  /// ||rho_t - rho^a_t (x) |0><0|||_1
  std::vector<double> error;
  /// Tr(b^dag b rho_t)
  std::vector<double> buffer_excitation;
};

/// Both trajectories need snapshots on the same time grid.
AdiabaticComparison compare_adiabatic(const Trajectory& full, const Trajectory& reduced,
                                      const CatModel& model);

struct AdiabaticPoint {
  double kappa = 0.0;
  AdiabaticComparison comparison;
};

/// Full and reduced runs from rho_a0 (x) |0><0| for one value of kappa.
AdiabaticPoint adiabatic_point(const ModelParams& params, const DensityMatrix& rho_a0,
                               const IntegratorConfig& cfg);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace catflow
