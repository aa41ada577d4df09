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

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catflow/model.hpp"

namespace catflow {

enum class SpanStatus { Complete, Stalled, Exhausted };
std::string_view to_string(SpanStatus s);

struct SpanReport {
  int target_dim = 0;
  int achieved_rank = 0;
  /// Singular values (descending) of the span restricted to the interior;
  /// entries past achieved_rank are the residual directions.
  Eigen::VectorXd residual_spectrum;
  int degree_budget = 0;
  double threshold = 1e-8;
  SpanStatus status = SpanStatus::Exhausted;
  /// Interior rank after each degree (index 0 = seeds).
  std::vector<int> rank_by_degree;
  /// Dimension of the generated span before interior projection.
  int generated_dim = 0;
  /// Largest degree whose interior components are untouched by the cutoff.
  int reach_degree = 0;
  /// Per residue class n mod k (single-mode spans only).
  std::vector<int> class_ranks;
  std::vector<int> class_targets;
};

/// Words in {G^dag, b^dag} of length <= degree_budget applied to
/// psi_L^r (x) |0>, orthogonalized breadth-first, then restricted to the
/// interior levels a < interior.na, b < interior.nb.
SpanReport generate_joint_span(const CatModel& model, int degree_budget, FockDims interior,
                               double threshold = 1e-8);

/// Orthonormal basis (columns, full joint space) of the span generated above.
Matrix joint_span_basis(const CatModel& model, int degree_budget, double threshold = 1e-8);

enum class SpanVariant { ELa, ELaPlusELsharp };
std::string_view to_string(SpanVariant v);
SpanVariant span_variant_from_string(std::string_view s);

/// Single-mode vectors L^dag^j v (ELa) and L^dag^j [L,L^dag]^(s) v, s < k
/// (ELsharp) for v in ker L, restricted to the lowest interior_na levels.
/// The target is the graded space span{a^dag^m v : m <= k J}; ELsharp
/// terms are kept up to the same degree (j <= J - s).  Requires
/// na >= interior_na + 2k.
SpanReport span_single_mode(const ModelParams& params, SpanVariant variant, int degree_budget,
                            int interior_na, double threshold = 1e-8);

/// The vectors used by span_single_mode, on the full mode-a truncation.
std::vector<Vector> single_mode_vectors(const ModelParams& params, SpanVariant variant,
                                        int degree_budget);

/// Containment of embedded single-mode vectors v (x) |0> in a joint span
/// given by orthonormal columns: largest relative residual.
double embedded_containment_residual(const std::vector<Vector>& single_mode, const Matrix& joint_q,
                                     FockDims dims);

struct TriangularTerm {
  int s = 0;
  /// coefficients[r] multiplies a^dag^r a^r, r <= k - s.
  std::vector<double> coefficients;
  double residual = 0.0;
  double leading = 0.0;
};

struct TriangularReport {
  int k = 0;
  int interior_na = 0;
  std::vector<TriangularTerm> terms;
};

/// [L,L^dag]^(s) = a^dag^{k(s-1)} sum_{r<=k-s} c_{s,r} a^dag^r a^r for
/// s = 1..k, checked on the lowest interior_na levels.  Throws
/// StructureViolation when a fit residual exceeds 1e-8 (relative).
TriangularReport triangular_structure_check(const ModelParams& params, int interior_na);

/// Coefficients C(k,r) k!/r! of a^dag^r a^r in [a^k, a^dag^k], r < k.
std::vector<double> leibniz_coefficients(int k);

struct IdentityResidual {
  std::string name;
  /// Max-entry residual.
  double residual = 0.0;
  /// Max-entry size of the right-hand side.
  double scale = 0.0;

  double relative() const { return residual / std::max(1.0, scale); }
};

/// Max-entry residuals of the ladder identities on the interior compression:
/// L^dag from [G^dag, b^dag], [L, L^dag] b^dag from [G^dag, L^dag] (iterated
/// up to s = k), the Leibniz expansion, and for alpha = 0 the conservation
/// [H, a^dag a / k + b^dag b] = 0.
std::vector<IdentityResidual> commutator_identities(const CatModel& model,
                                                    const std::vector<int>& interior);

}  // namespace catflow
