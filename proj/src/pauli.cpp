// Copyright 2026 The qudcomp Authors
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

#include "qudcomp/pauli.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"

namespace qudcomp {

namespace {

int mod(long long a, int d) { return static_cast<int>(((a % d) + d) % d); }

constexpr long long kGroupGuard = 1000000;

void require_same_shape(const PauliProduct& a, const PauliProduct& b) {
  if (a.d != b.d || a.n() != b.n()) {
    throw ShapeMismatch("Pauli products of different shape (d=" + std::to_string(a.d) +
                        ", n=" + std::to_string(a.n()) + " vs d=" + std::to_string(b.d) +
                        ", n=" + std::to_string(b.n()) + ")");
  }
}

}  // namespace

PauliProduct::PauliProduct(int d_, int lambda_, std::vector<int> x_, std::vector<int> z_)
    : d(d_), lambda(0), x(std::move(x_)), z(std::move(z_)) {
  require_dimension(d);
  if (x.size() != z.size()) throw ShapeMismatch("x and z lengths differ");
  lambda = mod(lambda_, d);
  for (int& v : x) v = mod(v, d);
  for (int& v : z) v = mod(v, d);
}

PauliProduct PauliProduct::identity(int d, int n) {
  return PauliProduct(d, 0, std::vector<int>(n, 0), std::vector<int>(n, 0));
}

PauliProduct PauliProduct::x_on(int d, int n, int q) {
  PauliProduct p = identity(d, n);
  p.x.at(q) = 1;
  return p;
}

PauliProduct PauliProduct::z_on(int d, int n, int q) {
  PauliProduct p = identity(d, n);
  p.z.at(q) = 1;
  return p;
}

PauliProduct pauli_mul(const PauliProduct& p1, const PauliProduct& p2) {
  require_same_shape(p1, p2);
  const int d = p1.d;
  long long lambda = static_cast<long long>(p1.lambda) + p2.lambda;
  std::vector<int> x(p1.n()), z(p1.n());
  for (int i = 0; i < p1.n(); ++i) {
    lambda -= static_cast<long long>(p1.z[i]) * p2.x[i];
    x[i] = p1.x[i] + p2.x[i];
    z[i] = p1.z[i] + p2.z[i];
  }
  return PauliProduct(d, mod(lambda, d), std::move(x), std::move(z));
}

PauliProduct pauli_pow(const PauliProduct& p, int k) {
  if (k < 0) throw InvalidArgument("negative Pauli power");
  PauliProduct out = PauliProduct::identity(p.d, p.n());
  for (int i = 0; i < k; ++i) out = pauli_mul(out, p);
  return out;
}

Matrix matrix_of(const PauliProduct& p) {
  require_dimension(p.d);
  const Matrix x = pauli_x(p.d);
  const Matrix z = pauli_z(p.d);
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < p.n(); ++i) {
    out = kron(out, matrix_power(x, p.x[i]) * matrix_power(z, p.z[i]));
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * p.lambda / p.d) * out;
}

std::vector<PauliProduct> enumerate_group(int d, int n) {
  require_dimension(d);
  if (n < 1) throw InvalidArgument("Pauli group needs n >= 1");
  long long order = d;
  for (int i = 0; i < 2 * n; ++i) {
    order *= d;
    if (order > kGroupGuard) {
      throw SizeGuard("Pauli group of d=" + std::to_string(d) + ", n=" + std::to_string(n) +
                      " exceeds 10^6 elements");
    }
  }
  std::vector<PauliProduct> out;
  out.reserve(static_cast<std::size_t>(order));
  std::vector<int> digits(2 * n, 0);
  for (int lambda = 0; lambda < d; ++lambda) {
    std::fill(digits.begin(), digits.end(), 0);
    for (long long k = 0; k < order / d; ++k) {
      out.emplace_back(d, lambda, std::vector<int>(digits.begin(), digits.begin() + n),
                       std::vector<int>(digits.begin() + n, digits.end()));
      for (int pos = 2 * n - 1; pos >= 0; --pos) {
        if (++digits[pos] < d) break;
        digits[pos] = 0;
      }
    }
  }
  return out;
}

std::optional<PauliProduct> decode_pauli(const Matrix& m, int d, int n, double tol) {
  const long long dim = int_pow(d, n);
  if (m.rows() != dim || m.cols() != dim) throw ShapeMismatch("matrix does not match d^n");
  // Phase-free products form an orthogonal basis under the trace inner
  // product, so the overlap picks out (x, z) and its argument gives λ.
  for (const PauliProduct& p : enumerate_group(d, n)) {
    if (p.lambda != 0) continue;
    const Matrix pm = matrix_of(p);
    const Complex overlap = (pm.adjoint() * m).trace() / static_cast<double>(dim);
    if (std::abs(std::abs(overlap) - 1.0) > tol) continue;
    const double turns = std::arg(overlap) * d / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) * 2.0 * std::numbers::pi / d > tol) return std::nullopt;
    PauliProduct candidate(d, static_cast<int>(rounded), p.x, p.z);
    if ((matrix_of(candidate) - m).cwiseAbs().maxCoeff() > tol) return std::nullopt;
    return candidate;
  }
  return std::nullopt;
}

CliffordCheck is_clifford(const Matrix& c, int d, int n, double tol) {
  const long long dim = int_pow(d, n);
  if (c.rows() != dim || c.cols() != dim) throw ShapeMismatch("matrix does not match d^n");
  require_unitary(c, "Clifford candidate", default_tolerances().unitarity);
  enumerate_group(d, n);  // size guard
  CliffordTableau tableau{d, n, {}};
  for (int q = 0; q < n; ++q) {
    for (const PauliProduct& g : {PauliProduct::x_on(d, n, q), PauliProduct::z_on(d, n, q)}) {
      const Matrix image = c * matrix_of(g) * c.adjoint();
      std::optional<PauliProduct> p = decode_pauli(image, d, n, tol);
      if (!p) return {false, std::nullopt};
      tableau.images.push_back(std::move(*p));
    }
  }
  return {true, std::move(tableau)};
}

PauliProduct apply_tableau(const CliffordTableau& t, const PauliProduct& p) {
  if (p.d != t.d || p.n() != t.n) throw ShapeMismatch("tableau and Pauli product differ in shape");
  PauliProduct out = PauliProduct::identity(t.d, t.n);
  out.lambda = p.lambda;
  for (int q = 0; q < t.n; ++q) {
    out = pauli_mul(out, pauli_pow(t.image_x(q), p.x[q]));
    out = pauli_mul(out, pauli_pow(t.image_z(q), p.z[q]));
  }
  return out;
}

CliffordTableau compose(const CliffordTableau& second, const CliffordTableau& first) {
  if (second.d != first.d || second.n != first.n) throw ShapeMismatch("tableaux differ in shape");
  CliffordTableau out{first.d, first.n, {}};
  for (const PauliProduct& image : first.images) out.images.push_back(apply_tableau(second, image));
  return out;
}

}  // namespace qudcomp
