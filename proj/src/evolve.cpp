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

#include "catflow/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "catflow/linalg.hpp"

namespace catflow {

DensityMatrix::DensityMatrix(Operator rho, double tol) : rho_(std::move(rho)) {
  const Matrix& m = rho_.matrix();
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol) {
    std::ostringstream os;
    os << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > tol) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << " differs from 1";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

DensityMatrix DensityMatrix::pure(const Ket& ket) {
  const Ket u = ket.normalized();
  return DensityMatrix(outer(u, u));
}

double DensityMatrix::min_eigenvalue() const { return linalg::min_eigenvalue(rho_.matrix()); }

Complex DensityMatrix::expectation(const Operator& x) const {
  if (x.space() != rho_.space() || x.size() != rho_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "observable does not match the state space");
  }
  return trace_product(rho_.matrix(), x.matrix());
}

Complex trace_product(const Matrix& rho, const Matrix& x) {
  return rho.cwiseProduct(x.transpose()).sum();
}

std::string_view to_string(IntegrationMethod m) {
  return m == IntegrationMethod::Rk4Fixed ? "rk4_fixed" : "rk4_adaptive";
}

IntegrationMethod integration_method_from_string(std::string_view s) {
  if (s == "rk4_fixed") return IntegrationMethod::Rk4Fixed;
  if (s == "rk4_adaptive") return IntegrationMethod::Rk4Adaptive;
  throw Error(ErrorKind::InvalidArgument, "unknown integration method '" + std::string(s) + "'");
}

void IntegratorConfig::validate() const {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_max must be > 0");
  if (dt < 0.0) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (dt > t_max) throw Error(ErrorKind::InvalidArgument, "dt must not exceed t_max");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) {
    throw Error(ErrorKind::InvalidArgument, "rel_tol must lie in (0, 1e-2]");
  }
  if (record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be >= 1");
  if (!(leakage_ceiling > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "leakage_ceiling must be > 0");
  }
}

double default_dt(const LindbladGenerator& gen) {
  double dt = 0.01;
  double kappa = 0.0;
  for (const auto& j : gen.jumps()) kappa = std::max(kappa, j.rate);
  if (kappa > 0.0) dt = std::min(dt, 0.1 / kappa);
  const double hn = gen.hamiltonian_norm_estimate();
  if (hn > 0.0) dt = std::min(dt, 0.1 / hn);
  double dn = 0.0;
  for (const auto& j : gen.jumps()) {
    const Matrix& m = j.op.matrix();
    dn += j.rate * linalg::max_eigenvalue(m.adjoint() * m);
  }
  if (dn > 0.0) dt = std::min(dt, 0.5 / dn);
  return dt;
}

IntegratorConfig resolve(const IntegratorConfig& cfg, const LindbladGenerator& gen) {
  IntegratorConfig out = cfg;
  if (out.dt == 0.0) out.dt = std::min(default_dt(gen), out.t_max);
  out.validate();
  return out;
}

const std::vector<Complex>& Trajectory::observable(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return series[i];
  throw Error(ErrorKind::InvalidArgument, "trajectory has no observable '" + name + "'");
}

std::vector<double> Trajectory::real_series(const std::string& name) const {
  const auto& s = observable(name);
  std::vector<double> out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [](Complex c) { return c.real(); });
  return out;
}

namespace {

template <class Rhs>
Matrix rk4(const Rhs& f, const Matrix& y, double h) {
  const Matrix k1 = f(y);
  const Matrix k2 = f(y + (0.5 * h) * k1);
  const Matrix k3 = f(y + (0.5 * h) * k2);
  const Matrix k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Enforced {
  Matrix rho;
  double trace_drift;
  double hermiticity_drift;
};

Enforced enforce(Matrix raw, double t, long step_index) {
  if (!raw.allFinite()) {
    std::ostringstream os;
    os << "integration diverged at step " << step_index << " (t=" << t << "): non-finite entries";
    throw Error(ErrorKind::IntegrationDiverged, os.str());
  }
  Enforced e;
  e.hermiticity_drift = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
  const Complex tr = raw.trace();
  e.trace_drift = std::abs(tr - 1.0);
  Matrix herm = 0.5 * (raw + raw.adjoint());
  herm /= herm.trace().real();
  e.rho = std::move(herm);
  return e;
}

void check_state(const LindbladGenerator& gen, const DensityMatrix& rho) {
  if (rho.space() != gen.space() || rho.op().size() != gen.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "state does not match the generator space");
  }
}

}  // namespace

Matrix rk4_step_raw(const LindbladGenerator& gen, const Matrix& rho, double dt) {
  return rk4([&](const Matrix& y) { return gen.apply(y); }, rho, dt);
}

StepResult step(const LindbladGenerator& gen, const DensityMatrix& rho, double dt) {
  check_state(gen, rho);
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be > 0");
  Enforced e = enforce(rk4([&](const Matrix& y) { return gen.apply_hermitian(y); }, rho.matrix(), dt),
                       dt, 1);
  return StepResult{DensityMatrix(Operator(rho.space(), rho.dims(), std::move(e.rho))),
                    e.trace_drift, e.hermiticity_drift};
}

StepResult step(const CatModel& model, const DensityMatrix& rho, double dt) {
  return step(model.generator(), rho, dt);
}

Trajectory evolve(const LindbladGenerator& gen, const DensityMatrix& rho0,
                  const IntegratorConfig& cfg_in, const std::vector<Observer>& observers) {
  check_state(gen, rho0);
  const IntegratorConfig cfg = resolve(cfg_in, gen);
  for (const auto& o : observers) {
    if (o.op.space() != gen.space() || o.op.size() != gen.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "observer '" + o.name + "' is on the wrong space");
    }
  }

  const Eigen::VectorXcd top = top_band_projector(gen.space(), gen.dims()).matrix().diagonal();
  auto rhs = [&](const Matrix& y) { return gen.apply_hermitian(y); };

  Trajectory traj;
  for (const auto& o : observers) {
    traj.names.push_back(o.name);
    traj.series.emplace_back();
  }
  traj.stats.min_step = std::numeric_limits<double>::infinity();

  Matrix rho = rho0.matrix();
  double t = 0.0;
  long step_index = 0;

  auto leakage_of = [&](const Matrix& r) { return r.diagonal().dot(top).real(); };
  auto check_leakage = [&](double leak) {
    if (leak > cfg.leakage_ceiling) {
      std::ostringstream os;
      os << "truncation breach at t=" << t << ": top-band population " << leak
         << " exceeds ceiling " << cfg.leakage_ceiling << "; increase na/nb";
      throw Error(ErrorKind::TruncationBreach, os.str());
    }
  };
  auto record = [&]() {
    traj.times.push_back(t);
    for (std::size_t i = 0; i < observers.size(); ++i)
      traj.series[i].push_back(trace_product(rho, observers[i].op.matrix()));
    traj.leakage.push_back(leakage_of(rho));
    if (cfg.snapshot_states) {
      traj.snapshots.emplace_back(Operator(gen.space(), gen.dims(), rho));
    }
  };
  auto accept = [&](Matrix raw, double h) {
    ++step_index;
    Enforced e = enforce(std::move(raw), t + h, step_index);
    traj.stats.max_trace_drift = std::max(traj.stats.max_trace_drift, e.trace_drift);
    traj.stats.max_hermiticity_drift =
        std::max(traj.stats.max_hermiticity_drift, e.hermiticity_drift);
    traj.stats.min_step = std::min(traj.stats.min_step, h);
    traj.stats.max_step = std::max(traj.stats.max_step, h);
    ++traj.stats.steps;
    rho = std::move(e.rho);
    check_leakage(leakage_of(rho));
  };

  check_leakage(leakage_of(rho));
  record();

  if (cfg.method == IntegrationMethod::Rk4Fixed) {
    const long n_steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    for (long i = 1; i <= n_steps; ++i) {
      const double t_next = std::min(static_cast<double>(i) * cfg.dt, cfg.t_max);
      const double h = t_next - t;
      accept(rk4(rhs, rho, h), h);
      t = (i == n_steps) ? cfg.t_max : t_next;
      if (i % cfg.record_every == 0 || i == n_steps) record();
    }
  } else {
    // Step doubling: one full step against two half steps, error measured in
    // trace norm; records land exactly on multiples of dt * record_every.
    const double record_dt = cfg.dt * cfg.record_every;
    const long n_records = static_cast<long>(std::ceil(cfg.t_max / record_dt - 1e-9));
    double h = cfg.dt;
    for (long r = 1; r <= n_records; ++r) {
      const double t_rec = (r == n_records) ? cfg.t_max : static_cast<double>(r) * record_dt;
      while (t < t_rec) {
        const double remaining = t_rec - t;
        const bool last = h >= remaining * (1.0 - 1e-12);
        const double hs = last ? remaining : h;
        const Matrix full = rk4(rhs, rho, hs);
        const Matrix half = rk4(rhs, rk4(rhs, rho, 0.5 * hs), 0.5 * hs);
        const double err = trace_norm(half - full) / 15.0;
        if (!std::isfinite(err)) {
          throw Error(ErrorKind::IntegrationDiverged, "non-finite error estimate at t=" +
                                                          std::to_string(t));
        }
        const double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(cfg.rel_tol / err, 0.2), 0.2, 4.0) : 4.0;
        if (err <= cfg.rel_tol) {
          accept(half, hs);
          t = last ? t_rec : t + hs;
          // A clipped final step says nothing against the nominal size.
          h = std::min(last ? std::max(h, hs * factor) : hs * factor, record_dt);
        } else {
          ++traj.stats.rejected;
          h = hs * factor;
        }
        if (h < 1e-14 * std::max(1.0, cfg.t_max)) {
          throw Error(ErrorKind::IntegrationDiverged,
                      "adaptive step underflow at t=" + std::to_string(t));
        }
      }
      record();
    }
  }
  if (!std::isfinite(traj.stats.min_step)) traj.stats.min_step = 0.0;
  traj.final_state.emplace(Operator(gen.space(), gen.dims(), std::move(rho)));
  return traj;
}

Trajectory evolve(const CatModel& model, const DensityMatrix& rho0, const IntegratorConfig& cfg,
                  const std::vector<Observer>& observers) {
  return evolve(model.generator(), rho0, cfg, observers);
}

Matrix propagator_expm(const LindbladGenerator& gen, double t, int dim_ceiling) {
  if (gen.dim() > dim_ceiling) {
    throw Error(ErrorKind::OracleTooLarge,
                "oracle propagator limited to dimension " + std::to_string(dim_ceiling) +
                    ", got " + std::to_string(gen.dim()));
  }
  const Matrix s = gen.superoperator();
  if (t == 0.0) return Matrix::Identity(s.rows(), s.cols());
  return linalg::expm(t * s);
}

Matrix propagator_expm(const CatModel& model, double t, int dim_ceiling) {
  return propagator_expm(model.generator(), t, dim_ceiling);
}

Matrix apply_propagator(const Matrix& propagator, const Matrix& rho) {
  const int n = static_cast<int>(rho.rows());
  if (propagator.rows() != static_cast<Eigen::Index>(n) * n) {
    throw Error(ErrorKind::DimensionMismatch, "propagator does not match state dimension");
  }
  return linalg::unvec(propagator * linalg::vec(rho), n);
}

Operator heisenberg_evolve(const LindbladGenerator& gen, const Operator& x, double t,
                           const IntegratorConfig& cfg_in) {
  if (x.space() != gen.space() || x.size() != gen.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "observable does not match the generator space");
  }
  if (t < 0.0) throw Error(ErrorKind::InvalidArgument, "negative evolution time");
  if (t == 0.0) return x;
  IntegratorConfig cfg = cfg_in;
  cfg.t_max = t;
  cfg = resolve(cfg, gen);
  auto rhs = [&](const Matrix& y) { return gen.adjoint_apply(y); };

  Matrix y = x.matrix();
  double now = 0.0;
  long step_index = 0;
  auto check = [&](const Matrix& m) {
    if (!m.allFinite()) {
      std::ostringstream os;
      os << "Heisenberg integration diverged at step " << step_index << " (t=" << now << ")";
      throw Error(ErrorKind::IntegrationDiverged, os.str());
    }
  };
  if (cfg.method == IntegrationMethod::Rk4Fixed) {
    const long n_steps = static_cast<long>(std::ceil(t / cfg.dt - 1e-9));
    for (long i = 1; i <= n_steps; ++i) {
      const double t_next = std::min(static_cast<double>(i) * cfg.dt, t);
      y = rk4(rhs, y, t_next - now);
      now = t_next;
      step_index = i;
      check(y);
    }
  } else {
    double h = cfg.dt;
    const double scale = std::max(1.0, x.matrix().norm());
    while (now < t) {
      const double hs = std::min(h, t - now);
      const Matrix full = rk4(rhs, y, hs);
      const Matrix half = rk4(rhs, rk4(rhs, y, 0.5 * hs), 0.5 * hs);
      const double err = (half - full).norm() / (15.0 * scale);
      if (err <= cfg.rel_tol) {
        y = half;
        now = (hs == t - now) ? t : now + hs;
        ++step_index;
        check(y);
      }
      const double factor =
          err > 0.0 ? std::clamp(0.9 * std::pow(cfg.rel_tol / err, 0.2), 0.2, 4.0) : 4.0;
      h = hs * factor;
      if (!(h > 1e-14 * std::max(1.0, t))) {
        throw Error(ErrorKind::IntegrationDiverged,
                    "adaptive step underflow at t=" + std::to_string(now));
      }
    }
  }
  return Operator(x.space(), x.dims(), std::move(y));
}

Operator heisenberg_evolve(const CatModel& model, const Operator& x, double t,
                           const IntegratorConfig& cfg) {
  return heisenberg_evolve(model.generator(), x, t, cfg);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t";
  for (const auto& name : traj.names) os << ',' << name << "_re," << name << "_im";
  os << ",leakage\n";
  os << std::setprecision(17);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    os << traj.times[j];
    for (const auto& s : traj.series) os << ',' << s[j].real() << ',' << s[j].imag();
    os << ',' << traj.leakage[j] << '\n';
  }
}

}  // namespace catflow
