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

#include <Eigen/Sparse>

#include "catflow/fock.hpp"

namespace catflow {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using RowSparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// A weighted Lindblad operator: rate * D[op].
struct JumpOperator {
  double rate = 0.0;
  Operator op;
};

/// Time-independent Lindblad generator
///
///   L(rho)  = -i[H, rho] + sum_j rate_j (J rho J^dag - 1/2 {J^dag J, rho})
///   L*(X)   =  i[H, X]   + sum_j rate_j (J^dag X J - 1/2 {J^dag J, X})
///
/// Operators are held sparse for the applies; results agree with the dense
/// formulas to rounding.
class LindbladGenerator {
 public:
  LindbladGenerator(Operator hamiltonian, std::vector<JumpOperator> jumps);

  Space space() const { return hamiltonian_.space(); }
  const FockDims& dims() const { return hamiltonian_.dims(); }
  int dim() const { return hamiltonian_.size(); }
  const Operator& hamiltonian() const { return hamiltonian_; }
  const std::vector<JumpOperator>& jumps() const { return jumps_; }

  /// L(rho) for arbitrary square rho.
  Matrix apply(const Matrix& rho) const;
  /// L(rho) for Hermitian rho; uses (A rho)^dag = rho A^dag to halve the work.
  Matrix apply_hermitian(const Matrix& rho) const;
  /// L*(x).
  Matrix adjoint_apply(const Matrix& x) const;

  /// Column-stacked superoperator S with vec(L(rho)) = S vec(rho).
  Matrix superoperator() const;

  /// Cheap estimate of the spectral norm of H by power iteration on H^dag H.
  double hamiltonian_norm_estimate(int iterations = 60) const;

 private:
  struct SparseJump {
    double rate;
    RowSparseMatrix op;
    RowSparseMatrix op_dag;
  };

  Operator hamiltonian_;
  std::vector<JumpOperator> jumps_;
  SparseMatrix h_;
  // K = -iH - 1/2 sum rate J^dag J, so L(rho) = K rho + rho K^dag + sum rate J rho J^dag.
  RowSparseMatrix k_;
  RowSparseMatrix k_dag_;
  std::vector<SparseJump> sparse_jumps_;
};

/// Superoperator of rho -> A rho B^dag under column stacking: conj(B) (x) A.
Matrix sandwich_superoperator(const Matrix& a, const Matrix& b);

}  // namespace catflow
