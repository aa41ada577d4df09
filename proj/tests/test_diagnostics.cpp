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
#include <doctest.h>

#include <cmath>
#include <random>

#include "catflow/diagnostics.hpp"
#include "catflow/linalg.hpp"
#include "oracles.hpp"

using namespace catflow;

namespace {

CatModel make(int k, double alpha, double kappa, int na, int nb) {
  return build_model({k, alpha, kappa, FockDims(na, nb)});
}

IntegratorConfig fixed(double t_max) {
  IntegratorConfig c;
  c.t_max = t_max;
  return c;
}

DensityMatrix on_manifold(const CatModel& m, int r) {
  return DensityMatrix::pure(tensor(m.kernel().vectors[r], Ket::basis(Space::B, FockDims(1, m.dims().nb), 0)));
}

}  // namespace

TEST_CASE("mass on H_L") {
  const CatModel m = make(2, 0.7, 2.0, 20, 4);
  CHECK(std::abs(mass_on_HL(on_manifold(m, 0), m).raw - 1.0) < 1e-9);
  const CatModel m0 = make(2, 0.0, 1.0, 8, 3);
  CHECK(std::abs(mass_on_HL(DensityMatrix::pure(Ket::basis(m0.dims(), 2, 0)), m0).raw) < 1e-9);
  CHECK(std::abs(mass_on_HL(DensityMatrix::pure(Ket::basis(m0.dims(), 1, 0)), m0).raw - 1.0) < 1e-9);
  CHECK_THROWS_AS(mass_on_HL(DensityMatrix::pure(Ket::basis(FockDims(8, 2), 1, 0)), m0), Error);
}

TEST_CASE("truncated state") {
  const CatModel m = make(2, 0.7, 2.0, 20, 4);
  const DensityMatrix rho = on_manifold(m, 1);
  CHECK((truncated_state(rho, m).matrix() - rho.matrix()).norm() < 1e-12);

  std::mt19937_64 rng(9);
  const DensityMatrix mixed(Operator(Space::AB, m.dims(), oracle::random_density(80, rng)));
  CHECK(std::abs(truncated_state(mixed, m).trace().real() - mass_on_HL(mixed, m).raw) < 1e-12);
}

TEST_CASE("max_decrease") {
  CHECK(max_decrease({0.1, 0.2, 0.3}) == 0.0);
  CHECK(max_decrease({0.1, 0.3, 0.25, 0.4}) == doctest::Approx(0.05));
}

TEST_CASE("truncated states increase along a trajectory") {
  const CatModel m = make(2, 0.7, 2.0, 12, 4);
  IntegratorConfig cfg = fixed(4.0);
  cfg.snapshot_states = true;
  cfg.record_every = 40;
  const Trajectory tr = evolve(m, DensityMatrix::pure(Ket::basis(m.dims(), 1, 0)), cfg,
                               {{"Pi", m.projector()}});
  CHECK(max_decrease(tr.real_series("Pi")) <= 1e-7);
  for (std::size_t j = 1; j < tr.snapshots.size(); ++j) {
    const Operator r0 = truncated_state(tr.snapshots[j - 1], m);
    const Operator r1 = truncated_state(tr.snapshots[j], m);
    CHECK(order_defect_on_HL(r0, r1, m) >= -1e-7);
  }
  // Positivity of increments: Cauchy increments equal trace increments.
  Trajectory tail = tr;
  const double last_mass = tr.real_series("Pi").back();
  const LimitEstimate est = extrapolate_limit(tail, m, std::min(0.5, last_mass));
  for (std::size_t j = 0; j < est.cauchy_increments.size(); ++j)
    CHECK(std::abs(est.cauchy_increments[j] - est.trace_increments[j]) < 1e-9);
  CHECK_THROWS_AS(extrapolate_limit(tail, m, 0.9999999), Error);
}

TEST_CASE("limit of a state already on H_L") {
  const CatModel m = make(2, 0.7, 2.0, 20, 4);
  const DensityMatrix rho0 = on_manifold(m, 0);
  IntegratorConfig cfg = fixed(0.5);
  cfg.snapshot_states = true;
  cfg.record_every = 10;
  const Trajectory tr = evolve(m, rho0, cfg, {});
  const LimitEstimate est = extrapolate_limit(tr, m);
  CHECK(trace_norm(est.rho_inf.matrix() - rho0.matrix()) < 1e-9);
  CHECK(est.off_manifold_mass < 1e-12);

  Trajectory empty;
  CHECK_THROWS_AS(extrapolate_limit(empty, m), Error);
}

TEST_CASE("limit of a perturbed even cat") {
  const CatModel m = make(2, 0.7, 2.0, 20, 6);
  Vector v = tensor(m.kernel().vectors[0], Ket::basis(Space::B, FockDims(1, 6), 0)).amplitudes();
  v(m.dims().index(2, 0)) += 0.1;
  IntegratorConfig cfg = fixed(5.0);
  cfg.snapshot_states = true;
  cfg.record_every = 500;
  const Trajectory tr = evolve(m, DensityMatrix::pure(Ket(Space::AB, m.dims(), v)), cfg, {});
  const LimitEstimate est = extrapolate_limit(tr, m);
  CHECK(est.off_manifold_mass <= 1e-4);
  CHECK(est.final_mass >= 0.99);
}

TEST_CASE("energy observables") {
  const CatModel m1 = make(1, 0.3, 1.0, 6, 3);
  const EnergyObservables e1 = energy_observables(m1);
  const Matrix expect = (m1.a().adjoint() * m1.a() + m1.b().adjoint() * m1.b()).matrix();
  CHECK((e1.V.matrix() - expect).norm() < 1e-13);
  CHECK((e1.W.matrix() - e1.W.matrix().adjoint()).norm() < 1e-13);

  const CatModel m2 = make(2, 0.0, 1.0, 6, 3);
  const EnergyObservables e2 = energy_observables(m2);
  const int i = m2.dims().index(2, 1);
  CHECK(e2.V.matrix()(i, i).real() == doctest::Approx(4.0));
}

TEST_CASE("energy decreases for alpha = 0") {
  for (int k : {1, 2}) {
    const CatModel m = make(k, 0.0, 1.0, 12, 7);
    const EnergyObservables e = energy_observables(m);
    IntegratorConfig cfg = fixed(3.0);
    cfg.record_every = 10;
    const Trajectory tr =
        evolve(m, DensityMatrix::pure(Ket::basis(m.dims(), 3, 1)), cfg, {{"V", e.V}});
    std::vector<double> neg = tr.real_series("V");
    for (double& x : neg) x = -x;
    CHECK(max_decrease(neg) <= 1e-7);
  }
}

TEST_CASE("Lyapunov certificate") {
  const std::vector<double> grid = geometric_grid(0.01, 10.0, 31);
  CHECK(grid.size() == 31);
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid.back() == doctest::Approx(10.0));
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), Error);

  const CatModel m = make(1, 0.0, 1.0, 16, 8);
  const CertificateReport r = lyapunov_certificate(m, {0.1, 2}, grid);
  CHECK(r.feasible);
  bool any_large = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.05) continue;
    const double c1 = r.c1_values[i];
    const std::vector<int> idx = lyapunov_interior(m, {0.1, 2});
    const EnergyObservables e = energy_observables(m);
    const Matrix x = linalg::compress(e.V.matrix() + 0.1 * e.W.matrix(), idx);
    const Matrix y = linalg::compress(m.generator().adjoint_apply(e.V.matrix() + 0.1 * e.W.matrix()), idx);
    const Matrix id = Matrix::Identity(x.rows(), x.cols());
    if (linalg::min_eigenvalue(c1 * id - grid[i] * x - y) >= -1e-8) any_large = true;
  }
  CHECK(any_large);

  const CertificateReport r0 = lyapunov_certificate(m, {0.0, 2}, grid);
  CHECK(r0.feasible);
  CHECK(r0.min_eig >= -1e-8);
  CHECK_THROWS_AS(lyapunov_certificate(m, {0.1, 1}, grid), Error);
  CHECK_THROWS_AS(lyapunov_certificate(m, {-0.1, 2}, grid), Error);
}

TEST_CASE("energy dissipation identity for alpha = 0") {
  for (int k : {1, 2, 3}) {
    const CatModel m = make(k, 0.0, 1.5, 14, 5);
    const Matrix n = (m.a().adjoint() * m.a()).matrix() / static_cast<double>(k) +
                     (m.b().adjoint() * m.b()).matrix();
    const Matrix lhs = m.generator().adjoint_apply(n);
    const Matrix rhs = -1.5 * (m.b().adjoint() * m.b()).matrix();
    const std::vector<int> idx = default_interior(m.params());
    CHECK(linalg::compress(lhs - rhs, idx).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("W is relatively bounded by V for k = 2") {
  const CatModel small = make(2, 0.7, 1.0, 16, 8);
  const CatModel large = make(2, 0.7, 1.0, 24, 12);
  const double c_small = w_relative_bound(small, 0.5, lyapunov_interior(small, {0.0, 4}));
  const double c_large = w_relative_bound(large, 0.5, lyapunov_interior(large, {0.0, 4}));
  CHECK(std::isfinite(c_small));
  CHECK(std::abs(c_large - c_small) <= 0.05 * std::abs(c_small));
}

TEST_CASE("block structure of the evolved projector") {
  const CatModel m = make(1, 0.0, 1.0, 8, 4);
  const BlockReport r0 = block_positivity_check(m, 0.0, fixed(1.0));
  CHECK(r0.diagonal_defect < 1e-12);
  CHECK(r0.off_diagonal < 1e-12);
  CHECK(std::abs(r0.complement_min_eig) < 1e-12);

  double prev = -1.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const BlockReport r = block_positivity_check(m, t, fixed(t));
    CHECK(r.off_diagonal <= 1e-7);
    CHECK(r.diagonal_defect <= 1e-7);
    CHECK(r.absorption_min_eig >= -1e-9);
    CHECK(r.complement_min_eig >= prev);
    prev = r.complement_min_eig;
    if (t == 1.0) CHECK(r.complement_min_eig > 1e-8);
  }
}

TEST_CASE("mass recursion over sampled times") {
  const CatModel m = make(1, 0.0, 1.0, 8, 4);
  const RecursionReport r =
      mass_recursion_check(m, DensityMatrix::pure(Ket::basis(m.dims(), 2, 0)), 1.0, 4, fixed(1.0));
  CHECK(r.delta > 0.0);
  CHECK(r.holds);
  CHECK(r.masses.size() == 5);
  CHECK_THROWS_AS(mass_recursion_check(m, DensityMatrix::pure(Ket::basis(m.dims(), 2, 0)), 0.0, 4,
                                            fixed(1.0)),
                  Error);
}
