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

#include "catflow/fock.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace catflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidParams: return "invalid-params";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::TruncationTooSmall: return "truncation-too-small";
    case ErrorKind::TruncationBreach: return "truncation-breach";
    case ErrorKind::IntegrationDiverged: return "integration-diverged";
    case ErrorKind::OracleTooLarge: return "oracle-too-large";
    case ErrorKind::NotConverged: return "not-converged";
    case ErrorKind::StructureViolation: return "structure-violation";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

std::string_view to_string(Space space) {
  switch (space) {
    case Space::A: return "A";
    case Space::B: return "B";
    case Space::AB: return "AB";
  }
  return "?";
}

FockDims::FockDims(int na_, int nb_) : na(na_), nb(nb_) {
  if (na < 1 || nb < 1) {
    throw Error(ErrorKind::InvalidDimension,
                "Fock truncation must be >= 1 (got na=" + std::to_string(na) +
                    ", nb=" + std::to_string(nb) + ")");
  }
}

int FockDims::size(Space space) const {
  switch (space) {
    case Space::A: return na;
    case Space::B: return nb;
    case Space::AB: return joint();
  }
  return 0;
}

namespace {

FockDims single_mode_dims(int n, Space mode) {
  if (n < 1) {
    throw Error(ErrorKind::InvalidDimension,
                "single-mode truncation must be >= 1, got " + std::to_string(n));
  }
  if (mode == Space::AB) {
    throw Error(ErrorKind::InvalidArgument, "single-mode operator requested on joint space");
  }
  return mode == Space::A ? FockDims(n, 1) : FockDims(1, n);
}

void require_same(const Operator& x, const Operator& y, const char* what) {
  if (x.space() != y.space() || x.size() != y.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": operands live on different spaces or sizes (" +
                    std::string(to_string(x.space())) + std::to_string(x.size()) + " vs " +
                    std::string(to_string(y.space())) + std::to_string(y.size()) + ")");
  }
}

}  // namespace

Ket::Ket(Space space, FockDims dims, Vector amplitudes)
    : space_(space), dims_(dims), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != dims_.size(space_)) {
    throw Error(ErrorKind::DimensionMismatch,
                "ket length " + std::to_string(amplitudes_.size()) + " does not match space " +
                    std::string(to_string(space_)) + " of size " +
                    std::to_string(dims_.size(space_)));
  }
}

Ket Ket::basis(Space space, FockDims dims, int level) {
  const int n = dims.size(space);
  if (level < 0 || level >= n) {
    throw Error(ErrorKind::InvalidArgument,
                "basis level " + std::to_string(level) + " outside 0.." + std::to_string(n - 1));
  }
  Vector v = Vector::Zero(n);
  v(level) = 1.0;
  return Ket(space, dims, std::move(v));
}

Ket Ket::basis(FockDims dims, int n, int m) {
  if (n < 0 || n >= dims.na || m < 0 || m >= dims.nb) {
    throw Error(ErrorKind::InvalidArgument,
                "joint basis state |" + std::to_string(n) + "," + std::to_string(m) +
                    "> outside truncation");
  }
  return basis(Space::AB, dims, dims.index(n, m));
}

Ket Ket::normalized() const {
  const double nrm = norm();
  if (nrm == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "cannot normalize the zero ket");
  }
  return Ket(space_, dims_, amplitudes_ / nrm);
}

Complex Ket::inner(const Ket& other) const {
  if (other.space_ != space_ || other.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, "inner product between kets of different spaces");
  }
  return amplitudes_.dot(other.amplitudes_);
}

Operator::Operator(Space space, FockDims dims, Matrix entries)
    : space_(space), dims_(dims), entries_(std::move(entries)) {
  const int n = dims_.size(space_);
  if (entries_.rows() != n || entries_.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator of shape " + std::to_string(entries_.rows()) + "x" +
                    std::to_string(entries_.cols()) + " does not match space " +
                    std::string(to_string(space_)) + " of size " + std::to_string(n));
  }
}

Operator Operator::identity(Space space, FockDims dims) {
  const int n = dims.size(space);
  return Operator(space, dims, Matrix::Identity(n, n));
}

Operator Operator::zero(Space space, FockDims dims) {
  const int n = dims.size(space);
  return Operator(space, dims, Matrix::Zero(n, n));
}

Operator Operator::adjoint() const { return Operator(space_, dims_, entries_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same(*this, rhs, "operator+");
  entries_ += rhs.entries_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same(*this, rhs, "operator-");
  entries_ -= rhs.entries_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  entries_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same(lhs, rhs, "operator*");
  return Operator(lhs.space_, lhs.dims_, lhs.entries_ * rhs.entries_);
}

Ket operator*(const Operator& op, const Ket& ket) {
  if (op.space() != ket.space() || op.size() != ket.size()) {
    throw Error(ErrorKind::DimensionMismatch, "operator and ket live on different spaces");
  }
  return Ket(ket.space(), ket.dims(), op.matrix() * ket.amplitudes());
}

Operator outer(const Ket& u, const Ket& v) {
  if (u.space() != v.space() || u.size() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "outer product between kets of different spaces");
  }
  return Operator(u.space(), u.dims(), u.amplitudes() * v.amplitudes().adjoint());
}

Operator annihilation(int n, Space mode) {
  const FockDims dims = single_mode_dims(n, mode);
  Matrix m = Matrix::Zero(n, n);
  for (int level = 1; level < n; ++level) {
    m(level - 1, level) = std::sqrt(static_cast<double>(level));
  }
  return Operator(mode, dims, std::move(m));
}

Operator creation(int n, Space mode) { return annihilation(n, mode).adjoint(); }

Operator number(int n, Space mode) {
  const FockDims dims = single_mode_dims(n, mode);
  Matrix m = Matrix::Zero(n, n);
  for (int level = 0; level < n; ++level) m(level, level) = static_cast<double>(level);
  return Operator(mode, dims, std::move(m));
}

Operator power(const Operator& x, int p) {
  if (p < 0) throw Error(ErrorKind::InvalidArgument, "negative operator power");
  Operator result = Operator::identity(x.space(), x.dims());
  for (int i = 0; i < p; ++i) result = result * x;
  return result;
}

Operator tensor(const Operator& a_op, const Operator& b_op) {
  if (a_op.space() != Space::A || b_op.space() != Space::B) {
    throw Error(ErrorKind::InvalidArgument, "tensor expects an A-mode and a B-mode operator");
  }
  const int na = a_op.size();
  const int nb = b_op.size();
  if ((a_op.dims().nb != 1 && a_op.dims().nb != nb) ||
      (b_op.dims().na != 1 && b_op.dims().na != na)) {
    throw Error(ErrorKind::DimensionMismatch, "tensor: operand truncations disagree");
  }
  const Matrix& x = a_op.matrix();
  const Matrix& y = b_op.matrix();
  Matrix k(na * nb, na * nb);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < na; ++j) {
      k.block(i * nb, j * nb, nb, nb) = x(i, j) * y;
    }
  }
  return Operator(Space::AB, FockDims(na, nb), std::move(k));
}

Ket tensor(const Ket& a_ket, const Ket& b_ket) {
  if (a_ket.space() != Space::A || b_ket.space() != Space::B) {
    throw Error(ErrorKind::InvalidArgument, "tensor expects an A-mode and a B-mode ket");
  }
  const int na = a_ket.size();
  const int nb = b_ket.size();
  Vector v(na * nb);
  for (int i = 0; i < na; ++i) v.segment(i * nb, nb) = a_ket.amplitudes()(i) * b_ket.amplitudes();
  return Ket(Space::AB, FockDims(na, nb), std::move(v));
}

Operator embed_a(const Operator& x, int nb) {
  return tensor(x, Operator::identity(Space::B, FockDims(1, nb)));
}

Operator embed_b(int na, const Operator& y) {
  return tensor(Operator::identity(Space::A, FockDims(na, 1)), y);
}

CoherentState coherent_state(Complex z, int n, double tail_tolerance) {
  const FockDims dims = single_mode_dims(n, Space::A);
  Vector v(n);
  const double r2 = std::norm(z);
  // e^{-|z|^2/2} z^m / sqrt(m!) by recurrence, avoiding factorial overflow.
  Complex term = std::exp(-0.5 * r2);
  double kept = 0.0;
  for (int m = 0; m < n; ++m) {
    if (m > 0) term *= z / std::sqrt(static_cast<double>(m));
    v(m) = term;
    kept += std::norm(term);
  }
  // Sum the dropped Poisson weights directly so small tails keep full precision.
  double tail = 0.0;
  double w = std::norm(term);
  for (int m = n; m < n + 4000; ++m) {
    w *= r2 / static_cast<double>(m);
    tail += w;
    if (w < 1e-300 || (m > r2 && w < 1e-18 * tail)) break;
  }
  if (n == 0 || kept == 0.0) tail = 1.0;
  CoherentState out{Ket(Space::A, dims, v / std::sqrt(kept)), tail, tail > tail_tolerance};
  return out;
}

Operator displacement(Complex alpha, int n) {
  const Operator a = annihilation(n);
  const Matrix gen = alpha * a.matrix().adjoint() - std::conj(alpha) * a.matrix();
  // gen = i K with K Hermitian.
  const Matrix k = -kI * gen;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.adjoint()));
  const Eigen::VectorXd& lam = es.eigenvalues();
  Vector phase(n);
  for (int i = 0; i < n; ++i) phase(i) = std::exp(kI * lam(i));
  Matrix d = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  return Operator(Space::A, a.dims(), std::move(d));
}

Operator rotation(double theta, int n) {
  const FockDims dims = single_mode_dims(n, Space::A);
  Matrix m = Matrix::Zero(n, n);
  for (int level = 0; level < n; ++level) {
    // Reduce the phase angle before exponentiating so that theta = 2 pi
    // lands on the identity to rounding.
    const double phi = std::remainder(theta * level, 2.0 * M_PI);
    m(level, level) = std::polar(1.0, phi);
  }
  return Operator(Space::A, dims, std::move(m));
}

double trace_norm(const Matrix& x) {
  if (x.rows() == 0) return 0.0;
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

double trace_norm(const Operator& x) { return trace_norm(x.matrix()); }

double hs_norm(const Operator& x) { return x.matrix().norm(); }

Operator commutator(const Operator& x, const Operator& y) {
  require_same(x, y, "commutator");
  return Operator(x.space(), x.dims(), x.matrix() * y.matrix() - y.matrix() * x.matrix());
}

Operator iterated_commutator(const Operator& x, const Operator& y, int s) {
  if (s < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "iterated commutator order must be >= 1, got " + std::to_string(s));
  }
  Operator c = commutator(x, y);
  for (int i = 1; i < s; ++i) c = commutator(c, y);
  return c;
}

}  // namespace catflow
