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
#include "catflow/density_probe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>

#include "catflow/linalg.hpp"

namespace catflow {

std::string_view to_string(SpanStatus s) {
  switch (s) {
    case SpanStatus::Complete: return "complete";
    case SpanStatus::Stalled: return "stalled";
    case SpanStatus::Exhausted: return "exhausted";
  }
  return "unknown";
}

std::string_view to_string(SpanVariant v) {
  return v == SpanVariant::ELa ? "ELa" : "ELa_plus_ELsharp";
}

SpanVariant span_variant_from_string(std::string_view s) {
  if (s == "ELa") return SpanVariant::ELa;
  if (s == "ELa_plus_ELsharp") return SpanVariant::ELaPlusELsharp;
  throw Error(ErrorKind::InvalidArgument, "unknown span variant '" + std::string(s) + "'");
}

namespace {

using RowSparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// Growing orthonormal basis with modified Gram-Schmidt and one
// reorthogonalization pass.
class Orthonormalizer {
 public:
  Orthonormalizer(int dim, double threshold) : q_(dim, dim), threshold_(threshold) {}

  // Adds the normalized residual of v when its relative size exceeds the
  // threshold; returns whether it was added.
  bool add(Vector v) {
    const double n0 = v.norm();
    if (n0 == 0.0 || count_ == q_.cols()) return false;
    v /= n0;
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < count_; ++i) v -= q_.col(i) * q_.col(i).dot(v);
    const double n1 = v.norm();
    if (n1 <= threshold_) return false;
    q_.col(count_++) = v / n1;
    return true;
  }

  int count() const { return count_; }
  auto basis() const { return q_.leftCols(count_); }
  Vector column(int i) const { return q_.col(i); }

 private:
  Matrix q_;
  int count_ = 0;
  double threshold_;
};

std::vector<int> rows_of_interior(FockDims dims, FockDims interior) {
  return interior_indices(dims, interior.na, interior.nb);
}

Eigen::VectorXd restricted_singular_values(const Matrix& q, const std::vector<int>& rows) {
  Matrix r(static_cast<Eigen::Index>(rows.size()), q.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) r.row(i) = q.row(rows[i]);
  return linalg::singular_values(r);
}

struct JointSpan {
  Matrix q;
  std::vector<int> rank_by_degree;
  int degrees_used = 0;
};

JointSpan build_joint_span(const CatModel& model, int degree_budget, double threshold,
                           const std::vector<int>* rows, int target) {
  if (degree_budget < 0) throw Error(ErrorKind::InvalidArgument, "degree_budget must be >= 0");
  const FockDims dims = model.dims();
  const RowSparse gdag = Matrix(model.G().adjoint().matrix()).sparseView(Complex(0.0), 0.0);
  const RowSparse bdag = Matrix(model.b().adjoint().matrix()).sparseView(Complex(0.0), 0.0);

  Orthonormalizer basis(dims.joint(), threshold);
  std::vector<int> frontier;
  for (const Ket& v : model.kernel().vectors) {
    Vector seed = Vector::Zero(dims.joint());
    for (int n = 0; n < dims.na; ++n) seed(dims.index(n, 0)) = v.amplitudes()(n);
    if (basis.add(seed)) frontier.push_back(basis.count() - 1);
  }
  JointSpan out;
  auto interior_rank = [&]() {
    if (!rows) return 0;
    return linalg::numerical_rank(restricted_singular_values(basis.basis(), *rows), threshold);
  };
  out.rank_by_degree.push_back(interior_rank());
  for (int d = 1; d <= degree_budget; ++d) {
    if (rows && out.rank_by_degree.back() >= target) break;
    std::vector<int> next;
    for (int i : frontier) {
      const Vector q = basis.column(i);
      if (basis.add(gdag * q)) next.push_back(basis.count() - 1);
      if (basis.add(bdag * q)) next.push_back(basis.count() - 1);
    }
    out.degrees_used = d;
    out.rank_by_degree.push_back(interior_rank());
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  out.q = basis.basis();
  return out;
}

Matrix ladder(int n) { return annihilation(n).matrix(); }

Matrix matrix_power(const Matrix& x, int p) {
  Matrix r = Matrix::Identity(x.rows(), x.cols());
  for (int i = 0; i < p; ++i) r = r * x;
  return r;
}

}  // namespace

SpanReport generate_joint_span(const CatModel& model, int degree_budget, FockDims interior,
                               double threshold) {
  const FockDims dims = model.dims();
  const int k = model.params().k;
  if (interior.na > dims.na - 2 * k || interior.nb > dims.nb - 2) {
    std::ostringstream os;
    os << "interior (" << interior.na << "," << interior.nb << ") needs margins of 2k in a and 2 in b"
       << " inside dims (" << dims.na << "," << dims.nb << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const std::vector<int> rows = rows_of_interior(dims, interior);
  SpanReport rep;
  rep.target_dim = static_cast<int>(rows.size());
  rep.degree_budget = degree_budget;
  rep.threshold = threshold;
  rep.reach_degree = std::min((dims.na - interior.na) / k, dims.nb - interior.nb);

  const JointSpan span = build_joint_span(model, degree_budget, threshold, &rows, rep.target_dim);
  rep.generated_dim = static_cast<int>(span.q.cols());
  rep.rank_by_degree = span.rank_by_degree;
  rep.residual_spectrum = restricted_singular_values(span.q, rows);
  rep.achieved_rank = linalg::numerical_rank(rep.residual_spectrum, threshold);
  if (rep.achieved_rank >= rep.target_dim) {
    rep.status = SpanStatus::Complete;
  } else {
    int flat = 0;
    for (std::size_t i = rep.rank_by_degree.size(); i-- > 1;) {
      if (rep.rank_by_degree[i] != rep.rank_by_degree[i - 1]) break;
      ++flat;
    }
    const bool closed = span.degrees_used < degree_budget;
    rep.status = (flat >= 3 || closed) ? SpanStatus::Stalled : SpanStatus::Exhausted;
  }
  return rep;
}

Matrix joint_span_basis(const CatModel& model, int degree_budget, double threshold) {
  return build_joint_span(model, degree_budget, threshold, nullptr, 0).q;
}

std::vector<Vector> single_mode_vectors(const ModelParams& params, SpanVariant variant,
                                        int degree_budget) {
  if (degree_budget < 0) throw Error(ErrorKind::InvalidArgument, "degree_budget must be >= 0");
  const KernelBasis kb = kernel_basis(params);
  const int na = params.dims.na;
  const int k = params.k;
  const FockDims adims(na, 1);
  Matrix l = matrix_power(ladder(na), k);
  l -= std::pow(params.alpha, k) * Matrix::Identity(na, na);
  const Matrix ldag = l.adjoint();

  std::vector<Vector> out;
  for (const Ket& v : kb.vectors) {
    Vector w = v.amplitudes();
    for (int j = 0; j <= degree_budget; ++j) {
      out.push_back(w);
      w = ldag * w;
    }
  }
  if (variant == SpanVariant::ELaPlusELsharp) {
    const Operator lop(Space::A, adims, l);
    const Operator ldop(Space::A, adims, ldag);
    for (int s = 1; s < k; ++s) {
      const Matrix c = iterated_commutator(lop, ldop, s).matrix();
      for (const Ket& v : kb.vectors) {
        Vector w = c * v.amplitudes();
        for (int j = 0; j <= degree_budget - s; ++j) {
          out.push_back(w);
          w = ldag * w;
        }
      }
    }
  }
  return out;
}

SpanReport span_single_mode(const ModelParams& params, SpanVariant variant, int degree_budget,
                            int interior_na, double threshold) {
  const int k = params.k;
  const int na = params.dims.na;
  if (interior_na < 1 || na < interior_na + 2 * k) {
    throw Error(ErrorKind::InvalidArgument,
                "span_single_mode needs 1 <= interior_na <= na - 2k (na=" + std::to_string(na) +
                    ", interior_na=" + std::to_string(interior_na) + ")");
  }
  const std::vector<Vector> vecs = single_mode_vectors(params, variant, degree_budget);

  // Graded target: a^dag^m v for m <= k J.
  const KernelBasis kb = kernel_basis(params);
  const Matrix adag = ladder(na).adjoint();
  std::vector<Vector> target;
  for (const Ket& v : kb.vectors) {
    Vector w = v.amplitudes();
    for (int m = 0; m <= k * degree_budget; ++m) {
      target.push_back(w);
      w = adag * w;
    }
  }

  auto restricted = [&](const std::vector<Vector>& vs, int cls) {
    std::vector<int> rows;
    for (int n = 0; n < interior_na; ++n)
      if (cls < 0 || n % k == cls) rows.push_back(n);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c) {
      for (std::size_t r = 0; r < rows.size(); ++r) m(r, c) = vs[c](rows[r]);
    }
    // Per-column normalization; columns vanishing on the rows are dropped.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double n = m.col(c).norm();
      if (n > 0.0) {
        m.col(c) /= n;
        keep.push_back(c);
      }
    }
    Matrix out(m.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) out.col(i) = m.col(keep[i]);
    return out;
  };

  SpanReport rep;
  rep.degree_budget = degree_budget;
  rep.threshold = threshold;
  rep.generated_dim = static_cast<int>(vecs.size());
  rep.reach_degree = (na - interior_na) / k;
  const Matrix span_m = restricted(vecs, -1);
  const Matrix target_m = restricted(target, -1);
  rep.residual_spectrum =
      span_m.cols() > 0 ? linalg::singular_values(span_m) : Eigen::VectorXd(Eigen::VectorXd::Zero(0));
  rep.achieved_rank = linalg::numerical_rank(rep.residual_spectrum, threshold);
  rep.target_dim = linalg::numerical_rank(linalg::singular_values(target_m), threshold);
  for (int c = 0; c < k; ++c) {
    const Matrix sc = restricted(vecs, c);
    const Matrix tc = restricted(target, c);
    rep.class_ranks.push_back(sc.cols() ? linalg::numerical_rank(linalg::singular_values(sc), threshold) : 0);
    rep.class_targets.push_back(tc.cols() ? linalg::numerical_rank(linalg::singular_values(tc), threshold) : 0);
  }
  rep.rank_by_degree.push_back(rep.achieved_rank);
  rep.status = rep.achieved_rank >= rep.target_dim ? SpanStatus::Complete : SpanStatus::Stalled;
  return rep;
}

double embedded_containment_residual(const std::vector<Vector>& single_mode, const Matrix& joint_q,
                                     FockDims dims) {
  double worst = 0.0;
  for (const Vector& v : single_mode) {
    if (v.size() != dims.na) {
      throw Error(ErrorKind::DimensionMismatch, "single-mode vector does not match na");
    }
    Vector e = Vector::Zero(dims.joint());
    for (int n = 0; n < dims.na; ++n) e(dims.index(n, 0)) = v(n);
    const double nrm = e.norm();
    if (nrm == 0.0) continue;
    e /= nrm;
    const Vector r = e - joint_q * (joint_q.adjoint() * e);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

std::vector<double> leibniz_coefficients(int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  std::vector<double> c(k);
  for (int r = 0; r < k; ++r) {
    double binom = 1.0;
    for (int i = 0; i < r; ++i) binom = binom * (k - i) / (i + 1);
    double ratio = 1.0;  // k!/r!
    for (int i = r + 1; i <= k; ++i) ratio *= i;
    c[r] = binom * ratio;
  }
  return c;
}

TriangularReport triangular_structure_check(const ModelParams& params, int interior_na) {
  const int k = params.k;
  if (k < 1) throw Error(ErrorKind::InvalidParams, "k must be >= 1");
  if (interior_na < k * (k - 1) + k + 2) {
    throw Error(ErrorKind::InvalidArgument, "interior_na too small to resolve the expansion");
  }
  const int n = interior_na + k * (k + 2);
  const FockDims adims(n, 1);
  Matrix l = matrix_power(ladder(n), k);
  l -= std::pow(params.alpha, k) * Matrix::Identity(n, n);
  const Operator lop(Space::A, adims, l);
  const Operator ldop = lop.adjoint();
  const Matrix a = ladder(n);
  const Matrix adag = a.adjoint();

  TriangularReport rep;
  rep.k = k;
  rep.interior_na = interior_na;
  for (int s = 1; s <= k; ++s) {
    const Matrix m = iterated_commutator(lop, ldop, s).matrix();
    const int shift = k * (s - 1);
    const int deg = k - s;
    const int points = interior_na - shift;
    // m(n + shift, n) = sqrt((n+shift)!/n!) * sum_r c_r n!/(n-r)!.
    Eigen::MatrixXd design(points, deg + 1);
    Eigen::VectorXd rhs(points);
    for (int p = 0; p < points; ++p) {
      double lift = 1.0;
      for (int i = p + 1; i <= p + shift; ++i) lift *= std::sqrt(static_cast<double>(i));
      rhs(p) = m(p + shift, p).real() / lift;
      double falling = 1.0;
      for (int r = 0; r <= deg; ++r) {
        design(p, r) = falling;
        falling *= (p - r);
      }
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    Matrix model = Matrix::Zero(n, n);
    for (int r = 0; r <= deg; ++r) model += coef(r) * matrix_power(adag, r) * matrix_power(a, r);
    model = matrix_power(adag, shift) * model;
    const Matrix diff = (m - model).topLeftCorner(interior_na, interior_na);
    const double scale =
        std::max(1.0, m.topLeftCorner(interior_na, interior_na).cwiseAbs().maxCoeff());
    TriangularTerm term;
    term.s = s;
    term.coefficients.assign(coef.data(), coef.data() + coef.size());
    term.residual = diff.cwiseAbs().maxCoeff() / scale;
    term.leading = coef(deg);
    if (term.residual > 1e-8) {
      std::ostringstream os;
      os << "[L,L^dag]^(" << s << ") deviates from the triangular form by " << term.residual;
      throw Error(ErrorKind::StructureViolation, os.str());
    }
    rep.terms.push_back(std::move(term));
  }
  return rep;
}

std::vector<IdentityResidual> commutator_identities(const CatModel& model,
                                                    const std::vector<int>& interior) {
  const FockDims dims = model.dims();
  const int k = model.params().k;
  const double kappa = model.params().kappa;
  const Operator gdag = model.G().adjoint();
  const Operator bdag = model.b().adjoint();
  const Operator l = model.L_joint();
  const Operator ldag = l.adjoint();
  auto maxabs = [&](const Operator& x) {
    return linalg::compress(x.matrix(), interior).cwiseAbs().maxCoeff();
  };
  std::vector<IdentityResidual> out;
  auto add = [&](std::string name, const Operator& lhs, const Operator& rhs) {
    out.push_back({std::move(name), maxabs(lhs - rhs), maxabs(rhs)});
  };

  add("ldag_from_gdag_bdag",
      Complex(0.0, -1.0) * commutator(gdag, bdag) - Complex(0.0, 0.5 * kappa) * bdag, ldag);
  for (int s = 1; s <= k; ++s) {
    add("llbracket_from_gdag_ldag_s" + std::to_string(s),
        Complex(0.0, -1.0) * iterated_commutator(gdag, ldag, s),
        iterated_commutator(l, ldag, s) * bdag);
  }
  const Operator a = model.a();
  const Operator ak = power(a, k);
  Operator expansion = Operator::zero(Space::AB, dims);
  const std::vector<double> c = leibniz_coefficients(k);
  for (int r = 0; r < k; ++r) {
    const Operator ar = power(a, r);
    expansion += Complex(c[r]) * (ar.adjoint() * ar);
  }
  add("leibniz", commutator(ak, ak.adjoint()), expansion);
  if (model.params().alpha == 0.0) {
    const Operator nb = bdag * model.b();
    const Operator v = Complex(1.0 / k) * (a.adjoint() * a) + nb;
    add("energy_conservation", commutator(model.H(), v), Operator::zero(Space::AB, dims));
    const Operator lv(Space::AB, dims, model.generator().adjoint_apply(v.matrix()));
    add("energy_dissipation", lv, Complex(-kappa) * nb);
  }
  return out;
}

}  // namespace catflow
