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
// Bargmann-Fock picture: a ket with Fock amplitudes u_m is the entire
// function f(z) = sum_m c_m z^m with c_m = u_m / sqrt(m!).  a acts as d/dz,
// a^dag as multiplication by z, and f(beta) = <K_beta, u> with the kernel
// ket K_beta of amplitudes conj(beta)^m / sqrt(m!).

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catflow/fock.hpp"
#include "catflow/model.hpp"

namespace catflow {

struct EntireCoeffs {
  Vector coeffs;

  int truncation() const { return static_cast<int>(coeffs.size()); }
};

EntireCoeffs to_bargmann(const Ket& ket);
/// Ket on mode a with dims (truncation, 1).
Ket from_bargmann(const EntireCoeffs& f);

/// F^2 pairing sum_m m! conj(f_m) g_m.
Complex f2_inner(const EntireCoeffs& f, const EntireCoeffs& g);

/// Coefficients of exp(lambda z), truncated.
EntireCoeffs exp_coeffs(Complex lambda, int truncation);
/// Coefficients of a polynomial (ascending powers), truncated or padded.
EntireCoeffs poly_coeffs(const std::vector<Complex>& poly, int truncation);

struct Product {
  EntireCoeffs value;
  /// F^2 norm of the dropped part relative to the full product.
  double tail = 0.0;
};

/// Product by coefficient convolution, cut at f's truncation.
Product multiply(const EntireCoeffs& f, const EntireCoeffs& g);

/// Formal derivative.
EntireCoeffs derivative(const EntireCoeffs& f);

struct Evaluation {
  Complex value;
  /// Largest |c_m beta^m| over the last five coefficients.
  double tail_estimate = 0.0;
  bool unreliable = false;
};

Evaluation eval_entire(const EntireCoeffs& f, Complex beta, double tolerance = 1e-10);

/// Kernel ket K_beta on n levels (unnormalized).
Ket reproducing_kernel(Complex beta, int n);

/// f(beta) as <K_beta, ket>.
Complex eval_by_kernel(const Ket& ket, Complex beta);

/// d^j f/dz^j at beta from the coefficients.
Complex derivative_at(const EntireCoeffs& f, Complex beta, int j);
/// The same value as <a^dag^j K_beta, ket>.
Complex derivative_by_kernel(const Ket& ket, Complex beta, int j);

struct ExpPolyZero {
  Complex point;
  int multiplicity = 1;
};

/// f(z) = p(z) exp(lambda z) with the zeros of p listed explicitly.
struct ExpPolynomial {
  std::string label;
  std::vector<Complex> poly;
  Complex lambda;
  std::vector<ExpPolyZero> zeros;

  int degree() const { return static_cast<int>(poly.size()) - 1; }
};

/// exp(alpha z).
ExpPolynomial pure_exponential(Complex alpha);
/// z^zero_order (z^k - alpha^k) exp(alpha z).
ExpPolynomial cat_exp_polynomial(int k, double alpha, int zero_order = 0);

struct WitnessReport {
  std::string label;
  int ambient_dim = 0;
  int subspace_dim = 0;
  int complement_dim = 0;
  int expected_dim = 0;
  /// Principal angles between the complement and the predicted directions.
  Eigen::VectorXd angles;
  double max_angle = 0.0;
  /// Singular values of the discarded directions when forming the complement.
  Eigen::VectorXd spectrum;
  bool passed = false;
};

/// Inside A = span{z^m exp(lambda z) : m < ambient_dim}, the multiples
/// {z^j f} have a complement spanned by the projections onto A of the
/// kernels z^j exp(conj(w) z), j < multiplicity, at the zeros w of p.
WitnessReport newman_shapiro_witness(const ExpPolynomial& f, int ambient_dim,
                                     double threshold = 1e-8, double angle_tolerance = 1e-6);

/// f = (z^k - alpha^k) exp(alpha z) with ambient dimension interior_na.
WitnessReport newman_shapiro_witness(const ModelParams& params, int interior_na);

}  // namespace catflow
