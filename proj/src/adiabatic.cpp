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
#include "catflow/adiabatic.hpp"

#include <cmath>
#include <sstream>

namespace catflow {

AdiabaticParams AdiabaticParams::from_model(const ModelParams& base) {
  base.validate();
  return AdiabaticParams{4.0 / base.kappa, base};
}

void AdiabaticParams::validate() const {
  base.validate();
  if (!(kappa_tilde > 0.0)) throw Error(ErrorKind::InvalidParams, "kappa_tilde must be > 0");
  if (std::abs(kappa_tilde * base.kappa - 4.0) > 1e-12) {
    throw Error(ErrorKind::InvalidParams, "kappa_tilde * kappa must equal 4");
  }
}

LindbladGenerator reduced_generator(const AdiabaticParams& params) {
  params.validate();
  const int na = params.base.dims.na;
  const FockDims dims(na, 1);
  Matrix l = power(annihilation(na), params.base.k).matrix();
  l -= std::pow(params.base.alpha, params.base.k) * Matrix::Identity(na, na);
  return LindbladGenerator(Operator::zero(Space::A, dims),
                           {JumpOperator{params.kappa_tilde, Operator(Space::A, dims, std::move(l))}});
}

Trajectory reduced_evolve(const AdiabaticParams& params, const DensityMatrix& rho_a0,
                          const IntegratorConfig& cfg, const std::vector<Observer>& observers) {
  if (rho_a0.space() != Space::A) {
    throw Error(ErrorKind::DimensionMismatch, "reduced_evolve expects a mode-a state");
  }
  return evolve(reduced_generator(params), rho_a0, cfg, observers);
}

DensityMatrix lift_to_joint(const DensityMatrix& rho_a, int nb) {
  if (rho_a.space() != Space::A) {
    throw Error(ErrorKind::DimensionMismatch, "lift_to_joint expects a mode-a state");
  }
  const int na = rho_a.op().size();
  const Ket vac = Ket::basis(Space::B, FockDims(1, nb), 0);
  const Operator pa(Space::A, FockDims(na, 1), rho_a.matrix());
  return DensityMatrix(tensor(pa, outer(vac, vac)));
}

AdiabaticComparison compare_adiabatic(const Trajectory& full, const Trajectory& reduced,
                                      const CatModel& model) {
  if (full.snapshots.size() != full.times.size() ||
      reduced.snapshots.size() != reduced.times.size()) {
    throw Error(ErrorKind::InvalidArgument, "compare_adiabatic needs snapshots at every record");
  }
  if (full.times.size() != reduced.times.size()) {
    throw Error(ErrorKind::GridMismatch, "full and reduced trajectories have different grids");
  }
  for (std::size_t j = 0; j < full.times.size(); ++j) {
    if (std::abs(full.times[j] - reduced.times[j]) > 1e-12 * std::max(1.0, full.times[j])) {
      std::ostringstream os;
      os << "time grids differ at record " << j << " (" << full.times[j] << " vs "
         << reduced.times[j] << ")";
      throw Error(ErrorKind::GridMismatch, os.str());
    }
  }
  const Matrix nb_op = (model.b().adjoint() * model.b()).matrix();
  AdiabaticComparison out;
  for (std::size_t j = 0; j < full.times.size(); ++j) {
    const DensityMatrix lifted = lift_to_joint(reduced.snapshots[j], model.dims().nb);
    if (lifted.op().size() != full.snapshots[j].op().size()) {
      throw Error(ErrorKind::DimensionMismatch, "reduced state does not match mode-a truncation");
    }
    out.times.push_back(full.times[j]);
    out.error.push_back(trace_norm(full.snapshots[j].matrix() - lifted.matrix()));
    out.buffer_excitation.push_back(trace_product(full.snapshots[j].matrix(), nb_op).real());
  }
  return out;
}

AdiabaticPoint adiabatic_point(const ModelParams& params, const DensityMatrix& rho_a0,
                               const IntegratorConfig& cfg_in) {
  const CatModel model = build_model(params);
  const AdiabaticParams ap = AdiabaticParams::from_model(params);
  IntegratorConfig cfg = cfg_in;
  cfg.snapshot_states = true;
  // One grid for both pictures, taken from the stiffer full model.
  cfg = resolve(cfg, model.generator());
  const Trajectory full = evolve(model, lift_to_joint(rho_a0, params.dims.nb), cfg, {});
  const Trajectory red = reduced_evolve(ap, rho_a0, cfg);
  return AdiabaticPoint{params.kappa, compare_adiabatic(full, red, model)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "loglog_slope needs two equal series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "loglog_slope needs positive data");
    }
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace catflow
