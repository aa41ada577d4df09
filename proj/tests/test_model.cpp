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
#include <numbers>
#include <random>

#include "catflow/linalg.hpp"
#include "catflow/model.hpp"
#include "oracles.hpp"

using namespace catflow;

namespace {

CatModel make(int k, double alpha, double kappa, int na, int nb) {
  return build_model({k, alpha, kappa, FockDims(na, nb)});
}

Operator joint(const CatModel& m, const Matrix& x) { return Operator(Space::AB, m.dims(), x); }

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_WITH_AS(make(0, 0.0, 1.0, 4, 3), "k must be >= 1", Error);
  CHECK_THROWS_AS(make(1, 0.0, 0.0, 4, 3), Error);
  CHECK_THROWS_AS(make(3, 0.0, 1.0, 3, 3), Error);
  CHECK_THROWS_AS(make(1, 0.0, 1.0, 4, 1), Error);
  CHECK_THROWS_AS(make(1, NAN, 1.0, 4, 3), Error);
}

TEST_CASE("model operators") {
  const CatModel m1 = make(1, 0.0, 1.0, 4, 3);
  CHECK((m1.L().matrix() - oracle::ladder(4)).norm() == 0.0);

  const CatModel m = make(2, 0.7, 2.0, 6, 3);
  CHECK(m.L().matrix()(0, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(m.L().matrix()(0, 0).real() == doctest::Approx(-0.49).epsilon(1e-14));
  CHECK((m.H().matrix() - m.H().matrix().adjoint()).norm() == 0.0);

  const oracle::Model o = oracle::cat_model(2, 0.7, 2.0, 6, 3);
  CHECK((m.H().matrix() - o.H).norm() < 1e-13);
  CHECK((m.G().matrix() - (oracle::C(0, -1) * o.H - 1.0 * o.b.adjoint() * o.b)).norm() < 1e-13);
}

TEST_CASE("generator matches the dense formula") {
  std::mt19937_64 rng(11);
  for (auto [k, alpha, kappa] : {std::tuple{1, 0.0, 1.0}, {2, 0.5, 1.0}, {3, 0.6, 2.5}}) {
    const CatModel m = make(k, alpha, kappa, 7, 3);
    const oracle::Model o = oracle::cat_model(k, alpha, kappa, 7, 3);
    const Matrix rho = oracle::random_hermitian(21, rng);
    const Matrix x = oracle::random_hermitian(21, rng) + oracle::C(0, 1) * oracle::random_hermitian(21, rng);
    const Matrix lr = lindbladian_apply(m, joint(m, rho)).matrix();
    CHECK((lr - oracle::lindblad_rhs(o, rho)).norm() < 1e-11 * (1.0 + lr.norm()));
    CHECK((m.generator().apply(x) - oracle::lindblad_rhs(o, x)).norm() < 1e-11 * (1.0 + x.norm() * 50));
    CHECK((m.generator().apply_hermitian(rho) - lr).norm() < 1e-12 * (1.0 + lr.norm()));
    CHECK((adjoint_lindbladian_apply(m, joint(m, x)).matrix() - oracle::lindblad_adjoint(o, x)).norm() <
          1e-11 * (1.0 + x.norm() * 50));
    // Trace preservation and Hermiticity.
    CHECK(std::abs(lr.trace()) < 1e-12 * (1.0 + lr.norm()));
    CHECK((lr - lr.adjoint()).norm() < 1e-12 * (1.0 + lr.norm()));
  }
}

TEST_CASE("superoperator matches the column-by-column oracle") {
  const CatModel m = make(2, 0.5, 1.0, 4, 3);
  const Matrix s = m.generator().superoperator();
  const Matrix ref = oracle::superoperator(oracle::cat_model(2, 0.5, 1.0, 4, 3));
  CHECK((s - ref).norm() < 1e-12 * ref.norm());

  Matrix a = Matrix::Random(3, 3), b = Matrix::Random(3, 3), r = Matrix::Random(3, 3);
  const Vector lhs = sandwich_superoperator(a, b) * linalg::vec(r);
  CHECK((linalg::unvec(lhs, 3) - a * r * b.adjoint()).norm() < 1e-13);
}

TEST_CASE("adjoint generator: unital and dual") {
  std::mt19937_64 rng(5);
  const CatModel m = make(2, 0.7, 2.0, 6, 4);
  const int n = m.dims().joint();
  const Operator id = Operator::identity(Space::AB, m.dims());
  CHECK(adjoint_lindbladian_apply(m, id).matrix().norm() < 1e-13);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix rho = oracle::random_density(n, rng);
    const Matrix x = oracle::random_hermitian(n, rng);
    const oracle::C lhs = (m.generator().apply(rho).adjoint() * x).trace();
    const oracle::C rhs = (rho.adjoint() * m.generator().adjoint_apply(x)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("kernel basis") {
  const KernelBasis k1 = kernel_basis({1, 0.0, 1.0, FockDims(6, 2)});
  CHECK(k1.vectors.size() == 1);
  CHECK(std::abs(k1.vectors[0].amplitudes()(0) - 1.0) < 1e-15);

  for (int k : {1, 2, 3}) {
    for (double alpha : {0.0, 0.6}) {
      const KernelBasis kb = kernel_basis({k, alpha, 1.0, FockDims(30, 2)});
      CHECK(kb.vectors.size() == static_cast<std::size_t>(k));
      CHECK(kb.gram_defect < 1e-12);
      for (double r : kb.l_residual) CHECK(r < 1e-8);
    }
  }

  const KernelBasis kb = kernel_basis({2, 0.7, 1.0, FockDims(30, 2)});
  for (int n = 0; n < 30; ++n) {
    const double bad = std::abs(kb.vectors[n % 2 == 0 ? 1 : 0].amplitudes()(n));
    CHECK(bad < 1e-12);
  }
  // Even cat: normalized alpha^n / sqrt(n!) on even n.
  const double c0 = kb.vectors[0].amplitudes()(0).real();
  CHECK(kb.vectors[0].amplitudes()(2).real() / c0 == doctest::Approx(0.49 / std::sqrt(2.0)));
}

TEST_CASE("projector onto H_L") {
  for (auto [k, alpha] : {std::pair{1, 0.0}, {2, 0.7}, {3, 0.6}}) {
    const CatModel m = make(k, alpha, 1.0, 24, 3);
    const Matrix p = projector_HL(m).matrix();
    CHECK(std::abs(p.trace() - static_cast<double>(k)) < 1e-10);
    CHECK((p * p - p).norm() < 1e-10);
    const Operator r = embed_a(rotation(2.0 * std::numbers::pi / k, 24), 3);
    CHECK((r.matrix() * p - p * r.matrix()).norm() < 1e-10);
    CHECK((m.projector().matrix() - p).norm() == 0.0);
  }
}

TEST_CASE("states on H_L are stationary") {
  const CatModel m = make(2, 0.7, 2.0, 24, 3);
  for (const Ket& v : m.kernel().vectors) {
    const Ket j = tensor(v, Ket::basis(Space::B, FockDims(1, 3), 0));
    const Operator rho = outer(j, j);
    CHECK(trace_norm(lindbladian_apply(m, rho)) < 1e-8);
  }
}

TEST_CASE("absorption direction of the adjoint generator") {
  const CatModel m = make(2, 0.7, 1.0, 12, 4);
  const Matrix y = adjoint_lindbladian_apply(m, m.projector()).matrix();
  const std::vector<int> interior = default_interior(m.params());
  CHECK(linalg::min_eigenvalue(linalg::compress(y, interior)) > -1e-8);
}

TEST_CASE("negative alpha is a rotated copy") {
  const CatModel pos = make(1, 0.5, 1.0, 6, 3);
  const CatModel neg = make(1, -0.5, 1.0, 6, 3);
  const AlphaReduction red = reduce_alpha(-0.5);
  CHECK(red.alpha == doctest::Approx(0.5));
  const Matrix u = alpha_reduction_unitary(red, 1, pos.dims()).matrix();
  std::mt19937_64 rng(2);
  const Matrix rho = oracle::random_density(18, rng);
  const Matrix lhs = neg.generator().apply(rho);
  const Matrix rhs = u * pos.generator().apply(u.adjoint() * rho * u) * u.adjoint();
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("interior helpers") {
  const FockDims d(5, 4);
  const std::vector<int> idx = interior_indices(d, 2, 3);
  CHECK(idx.size() == 6);
  CHECK(idx.back() == d.index(1, 2));
  const Operator top = top_band_projector(Space::AB, d);
  CHECK(top.trace().real() == doctest::Approx(5 + 4 - 1));
  const LindbladGenerator decay = buffer_decay_generator(d, 1.0);
  CHECK(decay.hamiltonian().matrix().norm() == 0.0);
}
