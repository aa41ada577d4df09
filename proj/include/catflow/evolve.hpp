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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catflow/fock.hpp"
#include "catflow/lindblad.hpp"
#include "catflow/model.hpp"

namespace catflow {

/// Hermitian, unit-trace operator.  Positivity is not enforced at
/// construction; query `min_eigenvalue()`.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator rho, double tol = 1e-8);

  static DensityMatrix pure(const Ket& ket);

  const Operator& op() const { return rho_; }
  const Matrix& matrix() const { return rho_.matrix(); }
  Space space() const { return rho_.space(); }
  const FockDims& dims() const { return rho_.dims(); }
  double min_eigenvalue() const;
  /// Tr(rho X)
  Complex expectation(const Operator& x) const;

 private:
  Operator rho_;
};

/// Tr(rho X) without forming the product.
Complex trace_product(const Matrix& rho, const Matrix& x);

enum class IntegrationMethod { Rk4Fixed, Rk4Adaptive };

std::string_view to_string(IntegrationMethod m);
IntegrationMethod integration_method_from_string(std::string_view s);

struct IntegratorConfig {
  /// Base step; 0 selects min(0.01, 0.1/kappa, 0.1/||H||_2, 0.5/sum rate ||J||^2).
  double dt = 0.0;
  double t_max = 1.0;
  IntegrationMethod method = IntegrationMethod::Rk4Fixed;
  double rel_tol = 1e-6;
  int record_every = 1;
  bool snapshot_states = false;
  /// Largest tolerated population of the top truncation band.
  double leakage_ceiling = 1e-3;

  void validate() const;
};

/// dt from the default rule for this generator (kappa = largest jump rate).
double default_dt(const LindbladGenerator& gen);
/// cfg with dt resolved.
IntegratorConfig resolve(const IntegratorConfig& cfg, const LindbladGenerator& gen);

struct Observer {
  std::string name;
  Operator op;
};

struct IntegrationStats {
  long steps = 0;
  long rejected = 0;
  /// Largest |Tr rho - 1| after a raw step, before renormalization.
  double max_trace_drift = 0.0;
  /// Largest max-entry |rho - rho^dag| after a raw step, before Hermitization.
  double max_hermiticity_drift = 0.0;
  double min_step = 0.0;
  double max_step = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::string> names;
  /// series[i][j] = Tr(rho_{t_j} X_i)
  std::vector<std::vector<Complex>> series;
  std::vector<DensityMatrix> snapshots;
  std::vector<double> leakage;
  /// State at t_max (always kept).
  std::optional<DensityMatrix> final_state;
  IntegrationStats stats;

  const std::vector<Complex>& observable(const std::string& name) const;
  std::vector<double> real_series(const std::string& name) const;
};

struct StepResult {
  DensityMatrix rho;
  double trace_drift = 0.0;
  double hermiticity_drift = 0.0;
};

/// One classical RK4 step without any structure enforcement.
Matrix rk4_step_raw(const LindbladGenerator& gen, const Matrix& rho, double dt);

/// RK4 step followed by Hermitization and trace renormalization.
StepResult step(const LindbladGenerator& gen, const DensityMatrix& rho, double dt);
StepResult step(const CatModel& model, const DensityMatrix& rho, double dt);

Trajectory evolve(const LindbladGenerator& gen, const DensityMatrix& rho0,
                  const IntegratorConfig& cfg, const std::vector<Observer>& observers);
Trajectory evolve(const CatModel& model, const DensityMatrix& rho0, const IntegratorConfig& cfg,
                  const std::vector<Observer>& observers);

/// Largest joint dimension accepted by the dense oracle.
inline constexpr int kOracleDimCeiling = 40;

/// exp(t S) for the column-stacked superoperator S of the generator.
Matrix propagator_expm(const LindbladGenerator& gen, double t,
                       int dim_ceiling = kOracleDimCeiling);
Matrix propagator_expm(const CatModel& model, double t, int dim_ceiling = kOracleDimCeiling);
Matrix apply_propagator(const Matrix& propagator, const Matrix& rho);

/// Integrates dX/dt = L*(X) up to time t.
Operator heisenberg_evolve(const LindbladGenerator& gen, const Operator& x, double t,
                           const IntegratorConfig& cfg);
Operator heisenberg_evolve(const CatModel& model, const Operator& x, double t,
                           const IntegratorConfig& cfg);

/// CSV with columns t, <name>_re, <name>_im ..., leakage.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace catflow
