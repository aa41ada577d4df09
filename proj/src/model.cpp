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

#include "catflow/model.hpp"

#include <cmath>
#include <string>

namespace catflow {

void ModelParams::validate() const {
  if (k < 1) throw Error(ErrorKind::InvalidParams, "k must be >= 1");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorKind::InvalidParams, "kappa must be > 0");
  }
  if (!std::isfinite(alpha)) throw Error(ErrorKind::InvalidParams, "alpha must be finite");
  if (dims.na <= k) {
    throw Error(ErrorKind::InvalidParams, "na must exceed k (na=" + std::to_string(dims.na) +
                                              ", k=" + std::to_string(k) + ")");
  }
  if (dims.nb < 2) throw Error(ErrorKind::InvalidParams, "nb must be >= 2");
}

AlphaReduction reduce_alpha(Complex alpha) { return {std::abs(alpha), std::arg(alpha)}; }

Operator alpha_reduction_unitary(const AlphaReduction& red, int k, FockDims dims) {
  const Operator ua = rotation(red.theta, dims.na);
  const Operator ub = rotation(k * red.theta, dims.nb);
  return tensor(ua, Operator(Space::B, FockDims(1, dims.nb), ub.matrix()));
}

namespace {

// Weights alpha^{2n}/n! for n < count, by recurrence.
std::vector<double> poisson_weights(double alpha, int count) {
  std::vector<double> w(count);
  const double a2 = alpha * alpha;
  double t = 1.0;
  for (int n = 0; n < count; ++n) {
    if (n > 0) t *= a2 / n;
    w[n] = t;
  }
  return w;
}

}  // namespace

KernelBasis kernel_basis(const ModelParams& params) {
  params.validate();
  const int k = params.k;
  const int na = params.dims.na;
  const FockDims adims(na, params.dims.nb);
  KernelBasis basis;
  basis.omega = std::polar(1.0, 2.0 * M_PI / k);

  if (params.alpha == 0.0) {
    basis.construction = KernelBasis::Construction::Fock;
    for (int r = 0; r < k; ++r) {
      basis.vectors.push_back(Ket::basis(Space::A, adims, r));
      basis.tail_mass.push_back(0.0);
    }
  } else {
    basis.construction = KernelBasis::Construction::Cat;
    // sum_j omega^{rj} |alpha omega^j> has Fock amplitudes
    // k e^{-alpha^2/2} alpha^n / sqrt(n!) on n = k - r (mod k) and zero elsewhere,
    // so the residue classes give exactly orthogonal vectors.
    const double a2 = params.alpha * params.alpha;
    const int extra = 60 + static_cast<int>(4.0 * a2);
    const std::vector<double> w = poisson_weights(params.alpha, na + extra);
    for (int r = 0; r < k; ++r) {
      const int residue = (k - r) % k;
      Vector v = Vector::Zero(na);
      double kept = 0.0;
      double dropped = 0.0;
      // Amplitudes alpha^n/sqrt(n!) by recurrence (keeps the sign of alpha).
      double amp = 1.0;
      for (int n = 0; n < na + extra; ++n) {
        if (n > 0) amp *= params.alpha / std::sqrt(static_cast<double>(n));
        if (n % k != residue) continue;
        if (n < na) {
          v(n) = amp;
          kept += w[n];
        } else {
          dropped += w[n];
        }
      }
      if (kept == 0.0) {
        throw Error(ErrorKind::TruncationTooSmall,
                    "residue class " + std::to_string(residue) + " has no support below na");
      }
      basis.vectors.emplace_back(Space::A, adims, v / std::sqrt(kept));
      basis.tail_mass.push_back(dropped / (kept + dropped));
    }
  }

  // Gram defect and kernel residuals.
  Matrix gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram(i, j) = basis.vectors[i].inner(basis.vectors[j]);
  basis.gram_defect = (gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (basis.gram_defect > 1e-8) {
    throw Error(ErrorKind::TruncationTooSmall,
                "kernel basis Gram defect " + std::to_string(basis.gram_defect) +
                    " exceeds 1e-8; increase na");
  }
  const Matrix ak = power(annihilation(na), k).matrix();
  const double ak_shift = std::pow(params.alpha, k);
  for (const Ket& v : basis.vectors) {
    const Vector res = ak * v.amplitudes() - ak_shift * v.amplitudes();
    basis.l_residual.push_back(res.norm());
  }
  return basis;
}

CatModel::CatModel(ModelParams p, Operator l, Operator h, Operator g, Operator a, Operator b,
                   Operator l_joint, Operator projector,
                   std::shared_ptr<const LindbladGenerator> gen, KernelBasis kernel)
    : params_(p),
      l_(std::move(l)),
      h_(std::move(h)),
      g_(std::move(g)),
      a_(std::move(a)),
      b_(std::move(b)),
      l_joint_(std::move(l_joint)),
      projector_(std::move(projector)),
      generator_(std::move(gen)),
      kernel_(std::move(kernel)) {}

CatModel build_model(const ModelParams& params) {
  params.validate();
  const FockDims dims = params.dims;
  const int na = dims.na;
  const int nb = dims.nb;

  const Matrix a1 = annihilation(na).matrix();
  Matrix lk = Matrix::Identity(na, na);
  for (int i = 0; i < params.k; ++i) lk = lk * a1;
  lk -= std::pow(params.alpha, params.k) * Matrix::Identity(na, na);
  Operator l(Space::A, dims, std::move(lk));

  const Operator bmode = annihilation(nb, Space::B);
  const Operator a = embed_a(annihilation(na), nb);
  const Operator b = embed_b(na, bmode);
  const Operator l_joint = tensor(l, Operator::identity(Space::B, FockDims(1, nb)));
  const Operator bdag = b.adjoint();
  const Operator h = l_joint * bdag + l_joint.adjoint() * b;
  const Operator nbop = bdag * b;
  const Operator g = Complex(0.0, -1.0) * h - Complex(0.5 * params.kappa) * nbop;

  KernelBasis kernel = kernel_basis(params);
  Matrix proj = Matrix::Zero(dims.joint(), dims.joint());
  const Ket vac_b = Ket::basis(Space::B, FockDims(1, nb), 0);
  for (const Ket& v : kernel.vectors) {
    const Ket joint = tensor(Ket(Space::A, FockDims(na, 1), v.amplitudes()), vac_b);
    proj += joint.amplitudes() * joint.amplitudes().adjoint();
  }
  Operator projector(Space::AB, dims, std::move(proj));

  auto gen = std::make_shared<const LindbladGenerator>(
      h, std::vector<JumpOperator>{JumpOperator{params.kappa, b}});
  return CatModel(params, std::move(l), h, g, a, b, l_joint, std::move(projector), std::move(gen),
                  std::move(kernel));
}

Operator lindbladian_apply(const CatModel& model, const Operator& rho) {
  if (rho.space() != Space::AB || rho.size() != model.dims().joint()) {
    throw Error(ErrorKind::DimensionMismatch, "lindbladian_apply expects a joint-space operator");
  }
  return Operator(Space::AB, model.dims(), model.generator().apply(rho.matrix()));
}

Operator adjoint_lindbladian_apply(const CatModel& model, const Operator& x) {
  if (x.space() != Space::AB || x.size() != model.dims().joint()) {
    throw Error(ErrorKind::DimensionMismatch,
                "adjoint_lindbladian_apply expects a joint-space operator");
  }
  return Operator(Space::AB, model.dims(), model.generator().adjoint_apply(x.matrix()));
}

Operator projector_HL(const CatModel& model) { return model.projector(); }

LindbladGenerator buffer_decay_generator(FockDims dims, double kappa) {
  const Operator b = embed_b(dims.na, annihilation(dims.nb, Space::B));
  return LindbladGenerator(Operator::zero(Space::AB, dims), {JumpOperator{kappa, b}});
}

std::vector<int> interior_indices(FockDims dims, int a_limit, int b_limit) {
  std::vector<int> idx;
  for (int n = 0; n < std::min(a_limit, dims.na); ++n)
    for (int m = 0; m < std::min(b_limit, dims.nb); ++m) idx.push_back(dims.index(n, m));
  return idx;
}

std::vector<int> default_interior(const ModelParams& params) {
  return interior_indices(params.dims, params.dims.na - 2 * params.k, params.dims.nb - 1);
}

Operator top_band_projector(Space space, FockDims dims) {
  const int n = dims.size(space);
  Matrix p = Matrix::Zero(n, n);
  if (space == Space::AB) {
    for (int i = 0; i < dims.na; ++i)
      for (int j = 0; j < dims.nb; ++j)
        if (i == dims.na - 1 || j == dims.nb - 1) p(dims.index(i, j), dims.index(i, j)) = 1.0;
  } else {
    p(n - 1, n - 1) = 1.0;
  }
  return Operator(space, dims, std::move(p));
}

}  // namespace catflow
