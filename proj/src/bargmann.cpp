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
#include "catflow/bargmann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "catflow/linalg.hpp"

namespace catflow {

namespace {

// sqrt(m!) for m < n.
std::vector<double> sqrt_factorials(int n) {
  std::vector<double> s(std::max(n, 1));
  s[0] = 1.0;
  for (int m = 1; m < n; ++m) s[m] = s[m - 1] * std::sqrt(static_cast<double>(m));
  return s;
}

Complex poly_eval(const std::vector<Complex>& p, Complex z) {
  Complex acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

EntireCoeffs to_bargmann(const Ket& ket) {
  if (ket.space() == Space::AB) {
    throw Error(ErrorKind::InvalidArgument, "to_bargmann expects a single-mode ket");
  }
  const int n = ket.size();
  const std::vector<double> sf = sqrt_factorials(n);
  EntireCoeffs f{Vector(n)};
  for (int m = 0; m < n; ++m) f.coeffs(m) = ket.amplitudes()(m) / sf[m];
  return f;
}

Ket from_bargmann(const EntireCoeffs& f) {
  const int n = f.truncation();
  const std::vector<double> sf = sqrt_factorials(n);
  Vector u(n);
  for (int m = 0; m < n; ++m) u(m) = f.coeffs(m) * sf[m];
  return Ket(Space::A, FockDims(n, 1), std::move(u));
}

Complex f2_inner(const EntireCoeffs& f, const EntireCoeffs& g) {
  if (f.truncation() != g.truncation()) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient sequences differ in length");
  }
  Complex acc = 0.0;
  double fact = 1.0;
  for (int m = 0; m < f.truncation(); ++m) {
    if (m > 0) fact *= m;
    acc += fact * std::conj(f.coeffs(m)) * g.coeffs(m);
  }
  return acc;
}

EntireCoeffs exp_coeffs(Complex lambda, int truncation) {
  EntireCoeffs f{Vector(truncation)};
  Complex t = 1.0;
  for (int m = 0; m < truncation; ++m) {
    if (m > 0) t *= lambda / static_cast<double>(m);
    f.coeffs(m) = t;
  }
  return f;
}

EntireCoeffs poly_coeffs(const std::vector<Complex>& poly, int truncation) {
  EntireCoeffs f{Vector::Zero(truncation)};
  for (int m = 0; m < std::min<int>(truncation, static_cast<int>(poly.size())); ++m)
    f.coeffs(m) = poly[m];
  return f;
}

Product multiply(const EntireCoeffs& f, const EntireCoeffs& g) {
  const int n = f.truncation();
  const int full = n + g.truncation() - 1;
  Vector c = Vector::Zero(std::max(full, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g.truncation(); ++j) c(i + j) += f.coeffs(i) * g.coeffs(j);
  // F^2 weights m!, accumulated through sqrt(m!) to stay finite.
  const std::vector<double> sf = sqrt_factorials(static_cast<int>(c.size()));
  double kept = 0.0, dropped = 0.0;
  for (int m = 0; m < c.size(); ++m) {
    const double w = std::norm(c(m) * sf[m]);
    (m < n ? kept : dropped) += w;
  }
  Product p{EntireCoeffs{c.head(n)}, 0.0};
  p.tail = kept + dropped > 0.0 ? std::sqrt(dropped / (kept + dropped)) : 0.0;
  return p;
}

EntireCoeffs derivative(const EntireCoeffs& f) {
  const int n = f.truncation();
  EntireCoeffs d{Vector::Zero(n)};
  for (int m = 0; m + 1 < n; ++m) d.coeffs(m) = static_cast<double>(m + 1) * f.coeffs(m + 1);
  return d;
}

Evaluation eval_entire(const EntireCoeffs& f, Complex beta, double tolerance) {
  const int n = f.truncation();
  Evaluation e;
  Complex pw = 1.0;
  Complex acc = 0.0;
  for (int m = 0; m < n; ++m) {
    const Complex term = f.coeffs(m) * pw;
    acc += term;
    if (m >= n - 5) e.tail_estimate = std::max(e.tail_estimate, std::abs(term));
    pw *= beta;
  }
  e.value = acc;
  e.unreliable = e.tail_estimate > tolerance * std::max(1.0, std::abs(acc));
  return e;
}

Ket reproducing_kernel(Complex beta, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidDimension, "kernel needs n >= 1");
  Vector u(n);
  Complex t = 1.0;
  const Complex bc = std::conj(beta);
  for (int m = 0; m < n; ++m) {
    if (m > 0) t *= bc / std::sqrt(static_cast<double>(m));
    u(m) = t;
  }
  return Ket(Space::A, FockDims(n, 1), std::move(u));
}

Complex eval_by_kernel(const Ket& ket, Complex beta) {
  return reproducing_kernel(beta, ket.size()).amplitudes().dot(ket.amplitudes());
}

Complex derivative_at(const EntireCoeffs& f, Complex beta, int j) {
  if (j < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be >= 0");
  EntireCoeffs d = f;
  for (int i = 0; i < j; ++i) d = derivative(d);
  return eval_entire(d, beta, 1.0).value;
}

Complex derivative_by_kernel(const Ket& ket, Complex beta, int j) {
  if (j < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be >= 0");
  const int n = ket.size();
  Vector k = reproducing_kernel(beta, n).amplitudes();
  const Matrix adag = creation(n).matrix();
  for (int i = 0; i < j; ++i) k = adag * k;
  return k.dot(ket.amplitudes());
}

ExpPolynomial pure_exponential(Complex alpha) {
  return ExpPolynomial{"exp(alpha z)", {Complex(1.0)}, alpha, {}};
}

ExpPolynomial cat_exp_polynomial(int k, double alpha, int zero_order) {
  if (k < 1 || zero_order < 0) {
    throw Error(ErrorKind::InvalidArgument, "cat_exp_polynomial needs k >= 1, zero_order >= 0");
  }
  if (alpha == 0.0) throw Error(ErrorKind::InvalidArgument, "cat_exp_polynomial needs alpha != 0");
  ExpPolynomial f;
  std::ostringstream os;
  if (zero_order > 0) os << "z^" << zero_order << " ";
  os << "(z^" << k << " - alpha^" << k << ") exp(alpha z)";
  f.label = os.str();
  f.poly.assign(zero_order + k + 1, Complex(0.0));
  f.poly[zero_order] = -std::pow(alpha, k);
  f.poly[zero_order + k] = 1.0;
  f.lambda = alpha;
  if (zero_order > 0) f.zeros.push_back({Complex(0.0), zero_order});
  for (int r = 0; r < k; ++r) f.zeros.push_back({std::polar(alpha, 2.0 * M_PI * r / k), 1});
  return f;
}

WitnessReport newman_shapiro_witness(const ExpPolynomial& f, int ambient_dim, double threshold,
                                     double angle_tolerance) {
  const int deg = f.degree();
  if (deg < 0) throw Error(ErrorKind::InvalidArgument, "empty polynomial");
  if (ambient_dim <= deg) {
    throw Error(ErrorKind::InvalidArgument, "ambient dimension must exceed the polynomial degree");
  }
  int expected = 0;
  for (const auto& z : f.zeros) {
    if (z.multiplicity < 1) throw Error(ErrorKind::InvalidArgument, "zero multiplicity must be >= 1");
    expected += z.multiplicity;
  }
  if (expected != deg) {
    throw Error(ErrorKind::InvalidArgument, "listed zeros do not account for the degree of p");
  }
  for (const auto& z : f.zeros) {
    std::vector<Complex> d = f.poly;
    for (int j = 0; j < z.multiplicity; ++j) {
      const double scale = std::max(1.0, std::abs(poly_eval(f.poly, std::abs(z.point) + 1.0)));
      if (std::abs(poly_eval(d, z.point)) > 1e-9 * scale) {
        throw Error(ErrorKind::InvalidArgument, "listed zero is not a zero of p");
      }
      std::vector<Complex> dd(d.size() > 1 ? d.size() - 1 : 1, Complex(0.0));
      for (std::size_t i = 1; i < d.size(); ++i) dd[i - 1] = static_cast<double>(i) * d[i];
      d = dd;
    }
  }

  // Kets long enough that every generator has negligible weight past the cut.
  const int n = ambient_dim + deg + 40 + static_cast<int>(4.0 * std::norm(f.lambda));
  const EntireCoeffs e = exp_coeffs(f.lambda, n);
  auto column = [&](const EntireCoeffs& g) {
    Vector u = from_bargmann(g).amplitudes();
    return Vector(u / u.norm());
  };

  Matrix amb(n, ambient_dim);
  for (int m = 0; m < ambient_dim; ++m) {
    std::vector<Complex> zm(m + 1, Complex(0.0));
    zm[m] = 1.0;
    amb.col(m) = column(multiply(e, poly_coeffs(zm, n)).value);
  }
  const int sub = ambient_dim - deg;
  Matrix gen(n, sub);
  for (int j = 0; j < sub; ++j) {
    std::vector<Complex> p(j + f.poly.size(), Complex(0.0));
    for (std::size_t i = 0; i < f.poly.size(); ++i) p[j + i] = f.poly[i];
    gen.col(j) = column(multiply(e, poly_coeffs(p, n)).value);
  }

  WitnessReport rep;
  rep.label = f.label;
  const Matrix qa = linalg::orthonormal_basis(amb, threshold);
  const Matrix qs = linalg::orthonormal_basis(gen, threshold);
  rep.ambient_dim = static_cast<int>(qa.cols());
  rep.subspace_dim = static_cast<int>(qs.cols());
  const Matrix comp = linalg::complement_in(qa, qs, threshold, &rep.spectrum);
  rep.complement_dim = static_cast<int>(comp.cols());
  rep.expected_dim = expected;

  if (expected > 0) {
    Matrix pred(n, expected);
    const Matrix adag = creation(n).matrix();
    int c = 0;
    for (const auto& z : f.zeros) {
      Vector kz = reproducing_kernel(z.point, n).amplitudes();
      for (int j = 0; j < z.multiplicity; ++j) {
        pred.col(c++) = qa * (qa.adjoint() * kz);
        kz = adag * kz;
      }
    }
    const Matrix qp = linalg::orthonormal_basis(pred, threshold);
    if (qp.cols() == comp.cols() && comp.cols() > 0) {
      rep.angles = linalg::principal_angles(comp, qp);
      rep.max_angle = rep.angles.maxCoeff();
    } else {
      rep.max_angle = M_PI / 2;
    }
  }
  rep.passed = rep.complement_dim == rep.expected_dim && rep.max_angle <= angle_tolerance;
  return rep;
}

WitnessReport newman_shapiro_witness(const ModelParams& params, int interior_na) {
  return newman_shapiro_witness(cat_exp_polynomial(params.k, params.alpha), interior_na);
}

}  // namespace catflow
