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

#include "catflow/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace catflow::linalg {

Eigen::VectorXd hermitian_eigenvalues(const Matrix& x) {
  if (x.rows() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& x) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(x);
  return ev.size() ? ev(0) : 0.0;
}

double max_eigenvalue(const Matrix& x) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(x);
  return ev.size() ? ev(ev.size() - 1) : 0.0;
}

Matrix compress(const Matrix& x, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = x(idx[i], idx[j]);
  return out;
}

Eigen::VectorXd singular_values(const Matrix& cols) {
  if (cols.size() == 0) return Eigen::VectorXd();
  Eigen::BDCSVD<Matrix> svd(cols);
  return svd.singularValues();
}

int numerical_rank(const Eigen::VectorXd& sv, double rel_threshold) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_threshold * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

Matrix orthonormal_basis(const Matrix& cols, double rel_threshold) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  const int r = numerical_rank(svd.singularValues(), rel_threshold);
  return svd.matrixU().leftCols(r);
}

Matrix complement_in(const Matrix& ambient, const Matrix& q, double rel_threshold,
                     Eigen::VectorXd* spectrum) {
  // Express span(q) in ambient coordinates, then take the orthogonal
  // complement there.
  const Matrix coords = ambient.adjoint() * q;
  const Eigen::Index m = ambient.cols();
  if (coords.cols() == 0) {
    if (spectrum) *spectrum = Eigen::VectorXd::Ones(m);
    return ambient;
  }
  Eigen::BDCSVD<Matrix> svd(coords, Eigen::ComputeFullU);
  const int r = numerical_rank(svd.singularValues(), rel_threshold);
  const Matrix u = svd.matrixU();
  if (spectrum) {
    // Residual of each ambient direction after removing span(q): the
    // singular values of (I - P_q) restricted to the ambient space.
    const Matrix resid = Matrix::Identity(m, m) - coords * coords.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (resid + resid.adjoint()),
                                             Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    *spectrum = ev;
  }
  return ambient * u.rightCols(m - r);
}

Eigen::VectorXd principal_angles(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() == 0 || q2.cols() == 0) return Eigen::VectorXd();
  // Sines of the angles from the component of q1 outside span(q2): accurate
  // for small angles, where the cosine route loses all precision.
  const Matrix resid = q1 - q2 * (q2.adjoint() * q1);
  Eigen::BDCSVD<Matrix> svd(resid);
  Eigen::VectorXd s = svd.singularValues();
  const Eigen::Index k = std::min(q1.cols(), q2.cols());
  Eigen::VectorXd angles(k);
  // Smallest sines correspond to the smallest angles.
  for (Eigen::Index i = 0; i < k; ++i) {
    const double si = std::clamp(s(s.size() - 1 - i), 0.0, 1.0);
    angles(i) = std::asin(si);
  }
  return angles;
}

Complex hs_inner(const Matrix& x, const Matrix& y) {
  return (x.adjoint() * y).trace();
}

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, int n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

Matrix expm(const Matrix& x) { return x.exp(); }

}  // namespace catflow::linalg
