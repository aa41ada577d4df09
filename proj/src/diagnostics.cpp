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
#include "catflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "catflow/linalg.hpp"

namespace catflow {

namespace {

void require_joint(const DensityMatrix& rho, const CatModel& model) {
  if (rho.space() != Space::AB || rho.dims() != model.dims()) {
    throw Error(ErrorKind::DimensionMismatch, "state does not match the model dimensions");
  }
}

}  // namespace

HLMass mass_on_HL(const DensityMatrix& rho, const CatModel& model) {
  require_joint(rho, model);
  const Matrix q = kernel_isometry(model);
  const double raw = (q.adjoint() * rho.matrix() * q).trace().real();
  return {raw, std::clamp(raw, 0.0, 1.0)};
}

Operator truncated_state(const DensityMatrix& rho, const CatModel& model) {
  require_joint(rho, model);
  const Matrix& p = model.projector().matrix();
  return Operator(Space::AB, model.dims(), p * rho.matrix() * p);
}

Matrix kernel_isometry(const CatModel& model) {
  const FockDims dims = model.dims();
  const int k = static_cast<int>(model.kernel().vectors.size());
  Matrix q = Matrix::Zero(dims.joint(), k);
  for (int r = 0; r < k; ++r) {
    const Vector& v = model.kernel().vectors[r].amplitudes();
    for (int n = 0; n < dims.na; ++n) q(dims.index(n, 0), r) = v(n);
  }
  return q;
}

double order_defect_on_HL(const Operator& earlier, const Operator& later, const CatModel& model) {
  const Matrix q = kernel_isometry(model);
  return linalg::min_eigenvalue(q.adjoint() * (later.matrix() - earlier.matrix()) * q);
}

double max_decrease(const std::vector<double>& series) {
  double worst = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) worst = std::max(worst, series[i - 1] - series[i]);
  return worst;
}

LimitEstimate extrapolate_limit(const Trajectory& traj, const CatModel& model,
                                double mass_threshold) {
  if (traj.snapshots.empty()) {
    throw Error(ErrorKind::InvalidArgument, "extrapolate_limit needs state snapshots");
  }
  const DensityMatrix& last = traj.snapshots.back();
  const HLMass final_mass = mass_on_HL(last, model);
  if (final_mass.raw < mass_threshold) {
    std::ostringstream os;
    os << "final mass on H_L " << final_mass.raw << " is below " << mass_threshold;
    throw Error(ErrorKind::NotConverged, os.str());
  }
  Matrix r = truncated_state(last, model).matrix();
  r /= r.trace().real();
  r = 0.5 * (r + r.adjoint());
  LimitEstimate est{DensityMatrix(Operator(Space::AB, model.dims(), r)), 0.0, 0.0, 0.0, {}, {}, {}, {}, {}};
  est.final_mass = final_mass.raw;
  est.off_manifold_mass = 1.0 - mass_on_HL(est.rho_inf, model).raw;

  Matrix prev_r;
  double prev_tr = 0.0;
  for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
    const DensityMatrix& s = traj.snapshots[j];
    est.times.push_back(traj.times.size() == traj.snapshots.size() ? traj.times[j]
                                                                    : static_cast<double>(j));
    est.masses.push_back(mass_on_HL(s, model).raw);
    est.distances.push_back(trace_norm(s.matrix() - r));
    const Matrix rj = truncated_state(s, model).matrix();
    const double trj = rj.trace().real();
    if (j > 0) {
      est.cauchy_increments.push_back(trace_norm(rj - prev_r));
      est.trace_increments.push_back(trj - prev_tr);
    }
    prev_r = rj;
    prev_tr = trj;
  }
  est.final_distance = est.distances.back();
  return est;
}

EnergyObservables energy_observables(const CatModel& model) {
  const FockDims dims = model.dims();
  const int k = model.params().k;
  Matrix v = Matrix::Zero(dims.joint(), dims.joint());
  for (int n = 0; n < dims.na; ++n)
    for (int m = 0; m < dims.nb; ++m)
      v(dims.index(n, m), dims.index(n, m)) = std::pow(static_cast<double>(n) / k + m, k);
  const Operator ak = power(model.a(), k);
  const Operator bdag = model.b().adjoint();
  const Operator w = kI * (ak * bdag - ak.adjoint() * model.b());
  return {Operator(Space::AB, dims, std::move(v)), w};
}

void LyapunovConfig::validate(int k) const {
  if (!(mu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mu must be >= 0");
  if (interior_margin < 2 * k) {
    throw Error(ErrorKind::InvalidArgument, "interior_margin must be >= 2k");
  }
}

std::vector<int> lyapunov_interior(const CatModel& model, const LyapunovConfig& cfg) {
  const int k = model.params().k;
  const FockDims dims = model.dims();
  const int b_margin = (cfg.interior_margin + k - 1) / k;
  if (dims.na - cfg.interior_margin < 1 || dims.nb - b_margin < 1) {
    throw Error(ErrorKind::InvalidArgument, "interior margin leaves an empty interior");
  }
  return interior_indices(dims, dims.na - cfg.interior_margin, dims.nb - b_margin);
}

CertificateReport lyapunov_certificate(const CatModel& model, const LyapunovConfig& cfg,
                                       const std::vector<double>& c2_grid) {
  cfg.validate(model.params().k);
  if (c2_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty C2 grid");
  const std::vector<int> idx = lyapunov_interior(model, cfg);
  const EnergyObservables e = energy_observables(model);
  const Matrix x = e.V.matrix() + cfg.mu * e.W.matrix();
  const Matrix y = model.generator().adjoint_apply(x);
  const Matrix xi = linalg::compress(x, idx);
  const Matrix yi = linalg::compress(y, idx);

  CertificateReport rep;
  rep.mu = cfg.mu;
  rep.interior_dim = static_cast<int>(idx.size());
  rep.c2_grid = c2_grid;
  const Eigen::VectorXd xe = linalg::hermitian_eigenvalues(xi);
  rep.x_min = xe(0);
  rep.x_max = xe(xe.size() - 1);
  rep.y_max = linalg::max_eigenvalue(yi);

  const Matrix id = Matrix::Identity(xi.rows(), xi.cols());
  double best = std::numeric_limits<double>::infinity();
  for (double c2 : c2_grid) {
    const double c1 = linalg::max_eigenvalue(c2 * xi + yi);
    rep.c1_values.push_back(c1);
    if (!(c2 > 0.0)) continue;
    const double min_eig = linalg::min_eigenvalue(c1 * id - c2 * xi - yi);
    const bool ok = min_eig >= -1e-8;
    if (ok && c1 / c2 < best) {
      best = c1 / c2;
      rep.c1 = c1;
      rep.c2 = c2;
      rep.min_eig = min_eig;
      rep.feasible = true;
    }
  }
  if (!rep.feasible) {
    // Report the last candidate for diagnosis.
    rep.c2 = c2_grid.back();
    rep.c1 = rep.c1_values.back();
    rep.min_eig = linalg::min_eigenvalue(rep.c1 * id - rep.c2 * xi - yi);
  }
  return rep;
}

CertificateReport lyapunov_certificate_scan(const CatModel& model, const std::vector<double>& mu_grid,
                                            int interior_margin,
                                            const std::vector<double>& c2_grid) {
  if (mu_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty mu grid");
  CertificateReport best;
  bool have = false;
  for (double mu : mu_grid) {
    CertificateReport r = lyapunov_certificate(model, LyapunovConfig{mu, interior_margin}, c2_grid);
    if (!have || (r.feasible && (!best.feasible || r.bound() < best.bound()))) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
    throw Error(ErrorKind::InvalidArgument, "geometric grid needs 0 < lo <= hi and n >= 1");
  }
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

double w_relative_bound(const CatModel& model, double eps, const std::vector<int>& interior) {
  const EnergyObservables e = energy_observables(model);
  return linalg::max_eigenvalue(linalg::compress(e.W.matrix() - eps * e.V.matrix(), interior));
}

Matrix interior_complement_basis(const CatModel& model, const std::vector<int>& interior) {
  const Matrix q = kernel_isometry(model);
  Matrix cols = Matrix::Zero(model.dims().joint(), static_cast<Eigen::Index>(interior.size()));
  for (std::size_t i = 0; i < interior.size(); ++i) cols(interior[i], i) = 1.0;
  // Two passes of projection against the kernel kets.
  cols -= q * (q.adjoint() * cols);
  cols -= q * (q.adjoint() * cols);
  return linalg::orthonormal_basis(cols, 1e-8);
}

BlockReport block_positivity_check(const CatModel& model, double t, const IntegratorConfig& cfg) {
  return block_positivity_check(model, t, cfg, default_interior(model.params()));
}

BlockReport block_positivity_check(const CatModel& model, double t, const IntegratorConfig& cfg,
                                   const std::vector<int>& interior) {
  const Operator tp = heisenberg_evolve(model, model.projector(), t, cfg);
  const Matrix& m = tp.matrix();
  const Matrix q = kernel_isometry(model);
  const Matrix qc = interior_complement_basis(model, interior);
  BlockReport rep;
  rep.t = t;
  rep.complement_dim = static_cast<int>(qc.cols());
  const int k = static_cast<int>(q.cols());
  rep.diagonal_defect = (q.adjoint() * m * q - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  rep.off_diagonal = qc.cols() > 0 ? (q.adjoint() * m * qc).cwiseAbs().maxCoeff() : 0.0;
  rep.complement_min_eig =
      qc.cols() > 0 ? linalg::min_eigenvalue(qc.adjoint() * m * qc) : 0.0;
  const Eigen::VectorXd ev = linalg::hermitian_eigenvalues(m);
  rep.min_eig = ev(0);
  rep.max_eig = ev(ev.size() - 1);
  rep.absorption_min_eig = linalg::min_eigenvalue(m - model.projector().matrix());
  return rep;
}

RecursionReport mass_recursion_check(const CatModel& model, const DensityMatrix& rho0,
                                          double t0, int n_steps, const IntegratorConfig& cfg) {
  if (!(t0 > 0.0) || n_steps < 1) {
    throw Error(ErrorKind::InvalidArgument, "recursion check needs t0 > 0 and n_steps >= 1");
  }
  const std::vector<int> interior = default_interior(model.params());
  RecursionReport rep;
  rep.t0 = t0;
  rep.delta = block_positivity_check(model, t0, cfg, interior).complement_min_eig;

  Eigen::VectorXd inside = Eigen::VectorXd::Zero(model.dims().joint());
  for (int i : interior) inside(i) = 1.0;
  auto outside_mass = [&](const DensityMatrix& r) {
    return 1.0 - (r.matrix().diagonal().real().array() * inside.array()).sum();
  };

  IntegratorConfig step_cfg = cfg;
  step_cfg.t_max = t0;
  step_cfg.snapshot_states = true;
  step_cfg.record_every = std::numeric_limits<int>::max();
  DensityMatrix rho = rho0;
  rep.masses.push_back(mass_on_HL(rho, model).raw);
  rep.epsilon = outside_mass(rho);
  for (int n = 0; n < n_steps; ++n) {
    Trajectory tr = evolve(model, rho, step_cfg, {});
    rho = tr.snapshots.back();
    rep.masses.push_back(mass_on_HL(rho, model).raw);
    rep.epsilon = std::max(rep.epsilon, outside_mass(rho));
  }
  rep.epsilon = std::max(rep.epsilon, 0.0);
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (int n = 0; n < n_steps; ++n) {
    const double rhs = (1.0 - rep.delta) * rep.masses[n] + rep.delta * (1.0 - 2.0 * rep.epsilon);
    rep.worst_slack = std::min(rep.worst_slack, rep.masses[n + 1] - rhs);
  }
  rep.holds = rep.delta > 0.0 && rep.delta < 1.0 && rep.worst_slack >= -1e-9;
  return rep;
}

}  // namespace catflow
