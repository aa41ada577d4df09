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

// Truncated Fock-space linear algebra for a two-mode bosonic system.
//
// Mode a has levels 0..na-1, mode b has levels 0..nb-1.  Joint kets and
// operators use the Kronecker convention with the a-index major, so the
// joint basis state |n>|m> sits at index n*nb + m.  Ladder operators are the
// exact matrices of the truncated basis; identities such as [a, a^dag] = 1
// fail on the top level and are only asserted on interior subspaces.

#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "catflow/error.hpp"

namespace catflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Space { A, B, AB };

std::string_view to_string(Space space);

struct FockDims {
  int na = 1;
  int nb = 1;

  FockDims() = default;
  FockDims(int na_, int nb_);

  int joint() const { return na * nb; }
  int size(Space space) const;
  int index(int n, int m) const { return n * nb + m; }

  friend bool operator==(const FockDims&, const FockDims&) = default;
};

class Ket {
 public:
  Ket(Space space, FockDims dims, Vector amplitudes);

  /// |n> in a single mode, or |n>|m> on the joint space.
  static Ket basis(Space space, FockDims dims, int level);
  static Ket basis(FockDims dims, int n, int m);

  Space space() const { return space_; }
  const FockDims& dims() const { return dims_; }
  const Vector& amplitudes() const { return amplitudes_; }
  int size() const { return static_cast<int>(amplitudes_.size()); }

  double norm() const { return amplitudes_.norm(); }
  Ket normalized() const;
  /// <this|other>
  Complex inner(const Ket& other) const;

 private:
  Space space_;
  FockDims dims_;
  Vector amplitudes_;
};

class Operator {
 public:
  Operator(Space space, FockDims dims, Matrix entries);

  static Operator identity(Space space, FockDims dims);
  static Operator zero(Space space, FockDims dims);

  Space space() const { return space_; }
  const FockDims& dims() const { return dims_; }
  const Matrix& matrix() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }

  Operator adjoint() const;
  Complex trace() const { return entries_.trace(); }
  bool is_hermitian(double tol) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, Complex s) { return lhs *= s; }
  friend Operator operator*(Complex s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Ket operator*(const Operator& op, const Ket& ket);

 private:
  Space space_;
  FockDims dims_;
  Matrix entries_;
};

/// Outer product |u><v|.
Operator outer(const Ket& u, const Ket& v);

// Single-mode operators on n levels; the result lives on mode A with
// dims (n, 1) unless a mode is requested explicitly.
Operator annihilation(int n, Space mode = Space::A);
Operator creation(int n, Space mode = Space::A);
Operator number(int n, Space mode = Space::A);

/// Integer power by repeated multiplication; power 0 is the identity.
Operator power(const Operator& x, int p);

Operator tensor(const Operator& a_op, const Operator& b_op);
Ket tensor(const Ket& a_ket, const Ket& b_ket);
Operator embed_a(const Operator& x, int nb);
Operator embed_b(int na, const Operator& y);

struct CoherentState {
  Ket ket;
  /// 1 - e^{-|z|^2} sum_{m<n} |z|^{2m}/m!, the probability dropped by the cutoff.
  double tail_mass = 0.0;
  bool truncation_warning = false;
};

CoherentState coherent_state(Complex z, int n, double tail_tolerance = 1e-10);

/// exp(alpha a^dag - conj(alpha) a) on n levels.  The generator is
/// anti-Hermitian in the truncated basis, so it is exponentiated through the
/// eigendecomposition of the Hermitian matrix -i(alpha a^dag - conj(alpha) a);
/// the result is unitary to rounding at any truncation.
Operator displacement(Complex alpha, int n);

/// exp(i theta a^dag a): diagonal with entries e^{i theta m}.
Operator rotation(double theta, int n);

double trace_norm(const Matrix& x);
double trace_norm(const Operator& x);
double hs_norm(const Operator& x);

Operator commutator(const Operator& x, const Operator& y);
/// [X,Y]^(1) = [X,Y]; [X,Y]^(s) = [[X,Y]^(s-1), Y].
Operator iterated_commutator(const Operator& x, const Operator& y, int s);

}  // namespace catflow
