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

#include "catflow/lindblad.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace catflow {

namespace {

SparseMatrix to_sparse(const Matrix& m) {
  // Exact zeros only; the ladder matrices are structurally sparse.
  return m.sparseView(Complex(0.0), 0.0);
}

void require_shape(const Matrix& x, int n, const char* what) {
  if (x.rows() != n || x.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                    " matrix, got " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

}  // namespace

LindbladGenerator::LindbladGenerator(Operator hamiltonian, std::vector<JumpOperator> jumps)
    : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  h_ = to_sparse(hamiltonian_.matrix());
  SparseMatrix k = -kI * h_;
  for (const auto& j : jumps_) {
    if (j.op.space() != hamiltonian_.space() || j.op.size() != hamiltonian_.size()) {
      throw Error(ErrorKind::DimensionMismatch, "jump operator does not match Hamiltonian space");
    }
    SparseMatrix op = to_sparse(j.op.matrix());
    SparseMatrix op_dag = op.adjoint();
    SparseMatrix op_dag_op = op_dag * op;
    k -= Complex(0.5 * j.rate) * op_dag_op;
    sparse_jumps_.push_back({j.rate, RowSparseMatrix(op), RowSparseMatrix(op_dag)});
  }
  k.prune(Complex(0.0), 0.0);
  k_ = k;
  k_dag_ = SparseMatrix(k.adjoint());
}

// Right products are formed as adjoints of left products, X S = (S^dag X^dag)^dag,
// so that every sparse product runs over row-major storage.

Matrix LindbladGenerator::apply(const Matrix& rho) const {
  require_shape(rho, dim(), "lindbladian apply");
  const Matrix rho_dag = rho.adjoint();
  Matrix out = k_ * rho;
  out += (k_ * rho_dag).adjoint();
  for (const auto& j : sparse_jumps_) {
    const Matrix jr = j.op * rho_dag;  // J rho^dag
    out += j.rate * (j.op * jr.adjoint());
  }
  return out;
}

Matrix LindbladGenerator::apply_hermitian(const Matrix& rho) const {
  require_shape(rho, dim(), "lindbladian apply");
  const Matrix half = k_ * rho;
  Matrix out = half + half.adjoint();
  for (const auto& j : sparse_jumps_) {
    const Matrix jr = j.op * rho;
    out += j.rate * (j.op * jr.adjoint());
  }
  return out;
}

Matrix LindbladGenerator::adjoint_apply(const Matrix& x) const {
  require_shape(x, dim(), "adjoint lindbladian apply");
  const Matrix x_dag = x.adjoint();
  Matrix out = k_dag_ * x;
  out += (k_dag_ * x_dag).adjoint();
  for (const auto& j : sparse_jumps_) {
    const Matrix jx = j.op_dag * x_dag;  // J^dag X^dag
    out += j.rate * (j.op_dag * jx.adjoint());
  }
  return out;
}

Matrix sandwich_superoperator(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(b.conjugate(), a).eval();
}

Matrix LindbladGenerator::superoperator() const {
  const int n = dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix& h = hamiltonian_.matrix();
  // -i (H rho I - I rho H)
  Matrix s = -kI * (sandwich_superoperator(h, id) - sandwich_superoperator(id, h.adjoint()));
  for (const auto& j : jumps_) {
    const Matrix& l = j.op.matrix();
    const Matrix ldl = l.adjoint() * l;
    s += j.rate * (sandwich_superoperator(l, l) - 0.5 * sandwich_superoperator(ldl, id) -
                   0.5 * sandwich_superoperator(id, ldl.adjoint()));
  }
  return s;
}

double LindbladGenerator::hamiltonian_norm_estimate(int iterations) const {
  const int n = dim();
  if (h_.nonZeros() == 0) return 0.0;
  // Deterministic start vector with support on every basis state.
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.37 * std::sin(1.3 * i), 0.11 * std::cos(0.7 * i));
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = h_.adjoint() * (h_ * v);
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    est = std::sqrt(nrm);
    v = w / nrm;
  }
  return est;
}

}  // namespace catflow
