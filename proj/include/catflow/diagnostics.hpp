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

#include <vector>

#include "catflow/evolve.hpp"
#include "catflow/model.hpp"

namespace catflow {

struct HLMass {
  double raw = 0.0;
  /// raw clamped to [0, 1].
  double clamped = 0.0;
};

/// Tr(rho Pi_L).
HLMass mass_on_HL(const DensityMatrix& rho, const CatModel& model);

/// r = Pi_L rho Pi_L.
Operator truncated_state(const DensityMatrix& rho, const CatModel& model);

/// Joint kets psi_L^r (x) |0> as columns (orthonormal).
Matrix kernel_isometry(const CatModel& model);

/// Smallest eigenvalue of (later - earlier) restricted to range(Pi_L).
double order_defect_on_HL(const Operator& earlier, const Operator& later, const CatModel& model);

/// Largest drop x[i] - x[i+1] over the series (0 if non-decreasing).
double max_decrease(const std::vector<double>& series);

struct LimitEstimate {
  DensityMatrix rho_inf;
  double final_mass = 0.0;
  /// ||rho_T - rho_inf||_1 at the final snapshot.
  double final_distance = 0.0;
  /// 1 - Tr(Pi_L rho_inf).
  double off_manifold_mass = 0.0;
  std::vector<double> times;
  std::vector<double> masses;
  /// ||rho_t - rho_inf||_1 at each snapshot.
  std::vector<double> distances;
  /// ||r_{t_{j+1}} - r_{t_j}||_1 and Tr r_{t_{j+1}} - Tr r_{t_j}.
  std::vector<double> cauchy_increments;
  std::vector<double> trace_increments;
};

/// Estimate of rho_inf from the final snapshot.  Throws NotConverged when the
/// final mass on H_L is below mass_threshold.
LimitEstimate extrapolate_limit(const Trajectory& traj, const CatModel& model,
                                double mass_threshold = 0.99);

struct EnergyObservables {
  /// (a^dag a / k + b^dag b)^k
  Operator V;
  /// i (a^k b^dag - a^dag^k b)
  Operator W;
};

EnergyObservables energy_observables(const CatModel& model);

struct LyapunovConfig {
  double mu = 0.1;
  /// Levels dropped at the top of mode a; mode b drops ceil(margin / k).
  int interior_margin = 2;

  void validate(int k) const;
};

/// Interior used by the certificate.
std::vector<int> lyapunov_interior(const CatModel& model, const LyapunovConfig& cfg);

struct CertificateReport {
  double mu = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  /// Smallest eigenvalue of C1 I - C2 X - L*(X) on the interior.
  double min_eig = 0.0;
  bool feasible = false;
  int interior_dim = 0;
  std::vector<double> c2_grid;
  std::vector<double> c1_values;
  /// Extreme eigenvalues of X and L*(X) on the interior.
  double x_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double bound() const { return c1 / c2; }
};

/// For each C2 on the grid, C1 is the smallest value making
/// C1 I - C2 X - L*(X) positive semidefinite on the interior, X = V + mu W.
/// The pair with the smallest C1/C2 is reported.
CertificateReport lyapunov_certificate(const CatModel& model, const LyapunovConfig& cfg,
                                       const std::vector<double>& c2_grid);

/// Best certificate over a mu grid (smallest C1/C2 among feasible reports).
CertificateReport lyapunov_certificate_scan(const CatModel& model, const std::vector<double>& mu_grid,
                                            int interior_margin, const std::vector<double>& c2_grid);

/// Geometric grid of n values from lo to hi.
std::vector<double> geometric_grid(double lo, double hi, int n);

/// Smallest C with W <= eps V + C on the interior.
double w_relative_bound(const CatModel& model, double eps, const std::vector<int>& interior);

struct BlockReport {
  double t = 0.0;
  /// max |Q^dag T_t(Pi_L) Q - I| over the kernel kets Q.
  double diagonal_defect = 0.0;
  /// max |Q^dag T_t(Pi_L) Q_c| with Q_c an orthonormal basis of the interior
  /// part of the complement of H_L.
  double off_diagonal = 0.0;
  double complement_min_eig = 0.0;
  /// Extreme eigenvalues of T_t(Pi_L).
  double min_eig = 0.0;
  double max_eig = 0.0;
  /// Smallest eigenvalue of T_t(Pi_L) - Pi_L.
  double absorption_min_eig = 0.0;
  int complement_dim = 0;
};

/// Orthonormal basis of the interior with the kernel kets projected out.
Matrix interior_complement_basis(const CatModel& model, const std::vector<int>& interior);

BlockReport block_positivity_check(const CatModel& model, double t, const IntegratorConfig& cfg);
BlockReport block_positivity_check(const CatModel& model, double t, const IntegratorConfig& cfg,
                                   const std::vector<int>& interior);

struct RecursionReport {
  double t0 = 0.0;
  double delta = 0.0;
  /// Largest population outside the interior along the sampled states.
  double epsilon = 0.0;
  std::vector<double> masses;
  /// min over n of m_{n+1} - (1 - delta) m_n - delta (1 - 2 eps).
  double worst_slack = 0.0;
  bool holds = false;
};

/// Samples m_n = mass_on_HL(rho_{n t0}) for n <= n_steps and tests
/// m_{n+1} >= (1 - delta) m_n + delta (1 - 2 eps).
RecursionReport mass_recursion_check(const CatModel& model, const DensityMatrix& rho0,
                                          double t0, int n_steps, const IntegratorConfig& cfg);

}  // namespace catflow
