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

// The bipartite cat-qubit model
//
//   d rho/dt = -i [H, rho] + kappa D[b](rho),   H = L b^dag + L^dag b,
//   L = a^k - alpha^k,                          G = -i H - kappa/2 b^dag b,
//
// together with the orthonormal basis of ker L and the projector onto
// ker L (x) |0>.

#pragma once

#include <memory>
#include <vector>

#include "catflow/fock.hpp"
#include "catflow/lindblad.hpp"

namespace catflow {

struct ModelParams {
  int k = 1;
  double alpha = 0.0;
  double kappa = 1.0;
  FockDims dims;

  /// Throws InvalidParams listing the first violated invariant.
  void validate() const;
};

/// A complex amplitude alpha = |alpha| e^{i theta}.  The model with alpha is
/// unitarily equivalent to the model with |alpha| under
/// U = rotation(theta) (x) rotation(k theta) (see `alpha_reduction_unitary`).
struct AlphaReduction {
  double alpha = 0.0;
  double theta = 0.0;
};

AlphaReduction reduce_alpha(Complex alpha);

/// U such that L_{alpha}(rho) = U L_{|alpha|}(U^dag rho U) U^dag.
Operator alpha_reduction_unitary(const AlphaReduction& red, int k, FockDims dims);

struct KernelBasis {
  enum class Construction { Fock, Cat };

  /// Orthonormal kets on mode A; vectors[r] is psi_L^r.
  std::vector<Ket> vectors;
  Complex omega{1.0, 0.0};
  Construction construction = Construction::Fock;
  /// Probability each untruncated psi_L^r carries above the cutoff.
  std::vector<double> tail_mass;
  /// ||L psi_L^r|| in the truncated space.
  std::vector<double> l_residual;
  double gram_defect = 0.0;
};

class CatModel {
 public:
  const ModelParams& params() const { return params_; }
  const FockDims& dims() const { return params_.dims; }

  /// L on mode A.
  const Operator& L() const { return l_; }
  const Operator& H() const { return h_; }
  const Operator& G() const { return g_; }
  /// The single dissipator (kappa, embed_b(b)).
  const std::vector<JumpOperator>& lindblad_ops() const { return generator_->jumps(); }
  const LindbladGenerator& generator() const { return *generator_; }

  const KernelBasis& kernel() const { return kernel_; }
  /// Projector onto ker L (x) |0>.
  const Operator& projector() const { return projector_; }

  // Joint-space ladder operators.
  const Operator& a() const { return a_; }
  const Operator& b() const { return b_; }
  /// L (x) I_b.
  const Operator& L_joint() const { return l_joint_; }

 private:
  friend CatModel build_model(const ModelParams& params);

  ModelParams params_;
  Operator l_, h_, g_, a_, b_, l_joint_, projector_;
  std::shared_ptr<const LindbladGenerator> generator_;
  KernelBasis kernel_;

  CatModel(ModelParams p, Operator l, Operator h, Operator g, Operator a, Operator b,
           Operator l_joint, Operator projector, std::shared_ptr<const LindbladGenerator> gen,
           KernelBasis kernel);
};

CatModel build_model(const ModelParams& params);

Operator lindbladian_apply(const CatModel& model, const Operator& rho);
Operator adjoint_lindbladian_apply(const CatModel& model, const Operator& x);

KernelBasis kernel_basis(const ModelParams& params);
Operator projector_HL(const CatModel& model);

/// Buffer-only dynamics kappa D[b] on the joint space (H = 0).
LindbladGenerator buffer_decay_generator(FockDims dims, double kappa);

/// Joint basis indices with a-level < a_limit and b-level < b_limit.
std::vector<int> interior_indices(FockDims dims, int a_limit, int b_limit);
/// Default interior of the model: a < na - 2k, b < nb - 1.
std::vector<int> default_interior(const ModelParams& params);
/// Projector onto the joint states with a = na-1 or b = nb-1 (or the top
/// level of a single mode).
Operator top_band_projector(Space space, FockDims dims);

}  // namespace catflow
