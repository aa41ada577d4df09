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

#include "catflow/fock.hpp"

namespace catflow::linalg {

/// Eigenvalues (ascending) of the Hermitian part of x.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& x);
double min_eigenvalue(const Matrix& x);
double max_eigenvalue(const Matrix& x);

/// Rows/columns `idx` of x.
Matrix compress(const Matrix& x, const std::vector<int>& idx);

/// Singular values (descending) of the column set `cols`.
Eigen::VectorXd singular_values(const Matrix& cols);

/// Number of singular values above rel_threshold * largest.
int numerical_rank(const Eigen::VectorXd& singular_values, double rel_threshold);

/// Orthonormal basis for the column span of `cols` (rank decided by rel_threshold).
Matrix orthonormal_basis(const Matrix& cols, double rel_threshold);

/// Orthonormal basis of the complement of span(q) inside span(ambient), both
/// given by orthonormal columns; singular values of the discarded directions
/// are written to `spectrum` when non-null.
Matrix complement_in(const Matrix& ambient, const Matrix& q, double rel_threshold,
                     Eigen::VectorXd* spectrum = nullptr);

/// Principal angles (radians, ascending) between two subspaces given by
/// orthonormal columns.
Eigen::VectorXd principal_angles(const Matrix& q1, const Matrix& q2);

/// Hilbert-Schmidt pairing <<x, y>> = Tr(x^dag y).
Complex hs_inner(const Matrix& x, const Matrix& y);

/// Column-stacking vectorization.
Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, int n);

/// Dense matrix exponential (Pade scaling and squaring).
Matrix expm(const Matrix& x);

}  // namespace catflow::linalg
