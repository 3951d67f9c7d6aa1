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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"
#include "qudcomp/pauli.hpp"
#include "qudcomp/sim.hpp"

using namespace qudcomp;

namespace {

// X and Z written out from their defining sums.
Matrix shift(int d) {
  Matrix x = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) x(j, (j + 1) % d) = 1.0;
  return x;
}

Matrix clock(int d) {
  Matrix z = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  return z;
}

Matrix power(const Matrix& m, int k) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

Matrix reference_matrix(const PauliProduct& p) {
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < p.n(); ++q) {
    out = oracle::kron(out, power(shift(p.d), p.x[q]) * power(clock(p.d), p.z[q]));
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * p.lambda / p.d) * out;
}

}  // namespace

TEST_CASE("matrix_of matches the defining product") {
  CHECK(oracle::max_abs(matrix_of(PauliProduct::identity(3, 2)) - Matrix::Identity(9, 9)) == 0.0);
  CHECK(oracle::max_abs(matrix_of(PauliProduct(2, 0, {1}, {0})) - shift(2)) == 0.0);
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 3);
  CHECK(oracle::max_abs(matrix_of(PauliProduct(3, 1, {1}, {1})) - w * shift(3) * clock(3)) < 1e-14);
  for (int d = 2; d <= 3; ++d) {
    for (int n = 1; n <= 2; ++n) {
      for (const PauliProduct& p : enumerate_group(d, n)) {
        CHECK(oracle::max_abs(matrix_of(p) - reference_matrix(p)) < 1e-12);
      }
    }
  }
}

TEST_CASE("pauli_mul is a homomorphism, exhaustively for d <= 3, n <= 2") {
  const PauliProduct y = pauli_mul(PauliProduct(2, 0, {1}, {0}), PauliProduct(2, 0, {0}, {1}));
  CHECK(y.x == std::vector<int>{1});
  CHECK(y.z == std::vector<int>{1});
  for (int d = 2; d <= 3; ++d) {
    for (int n = 1; n <= 2; ++n) {
      const auto group = enumerate_group(d, n);
      std::vector<Matrix> mats;
      for (const auto& p : group) mats.push_back(reference_matrix(p));
      int failures = 0;
      for (std::size_t i = 0; i < group.size(); ++i) {
        CHECK(pauli_mul(PauliProduct::identity(d, n), group[i]) == group[i]);
        for (std::size_t j = 0; j < group.size(); ++j) {
          const Matrix prod = reference_matrix(pauli_mul(group[i], group[j]));
          if (oracle::max_abs(prod - mats[i] * mats[j]) > 1e-10) ++failures;
        }
      }
      CHECK(failures == 0);
    }
  }
  CHECK_THROWS_AS(pauli_mul(PauliProduct::identity(2, 1), PauliProduct::identity(2, 2)), ShapeMismatch);
}

TEST_CASE("group orders") {
  CHECK(enumerate_group(2, 1).size() == 8);
  CHECK(enumerate_group(3, 1).size() == 27);
  CHECK(enumerate_group(2, 2).size() == 32);
  CHECK_THROWS_AS(enumerate_group(5, 4), SizeGuard);

  // Closure of {X, Z} under multiplication, by matrices alone.
  for (int d = 2; d <= 3; ++d) {
    std::vector<Matrix> elems{shift(d), clock(d)};
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        for (const Matrix& m : {Matrix(elems[i] * elems[j]), Matrix(elems[j] * elems[i])}) {
          bool seen = false;
          for (const Matrix& e : elems) seen = seen || oracle::max_abs(e - m) < 1e-9;
          if (!seen) elems.push_back(m);
        }
      }
    }
    CHECK(elems.size() == static_cast<std::size_t>(d * d * d));
  }
}

TEST_CASE("decode round trip") {
  for (const PauliProduct& p : enumerate_group(3, 2)) {
    const auto q = decode_pauli(matrix_of(p), 3, 2);
    REQUIRE(q.has_value());
    CHECK(*q == p);
  }
  CHECK_FALSE(decode_pauli(hadamard(3), 3, 1).has_value());
  CHECK(pauli_pow(PauliProduct(3, 0, {1}, {1}), 3) == PauliProduct::identity(3, 1));
}

TEST_CASE("Clifford classification") {
  SUBCASE("H2 swaps X and Z") {
    const CliffordCheck c = is_clifford(hadamard(2), 2, 1);
    REQUIRE(c.is_clifford);
    REQUIRE(c.tableau.has_value());
    CHECK(c.tableau->image_x(0).x == std::vector<int>{0});
    CHECK(c.tableau->image_x(0).z == std::vector<int>{1});
    CHECK(c.tableau->image_z(0).x == std::vector<int>{1});
    CHECK(c.tableau->image_z(0).z == std::vector<int>{0});
  }
  SUBCASE("CNOT maps X0 to X0 X1") {
    const CliffordCheck c = is_clifford(sum_gate(2, 2), 2, 2);
    REQUIRE(c.is_clifford);
    CHECK(c.tableau->image_x(0).x == std::vector<int>{1, 1});
    CHECK(c.tableau->image_x(0).z == std::vector<int>{0, 0});
  }
  SUBCASE("Paulis, T, qutrit gates") {
    for (int d = 2; d <= 3; ++d) {
      for (const PauliProduct& p : enumerate_group(d, 1)) {
        CHECK(is_clifford(matrix_of(p), d, 1).is_clifford);
      }
    }
    CHECK_FALSE(is_clifford(tgate(2), 2, 1).is_clifford);
    CHECK_FALSE(is_clifford(tgate(2), 2, 1).tableau.has_value());
    const CliffordCheck h3 = is_clifford(hadamard(3), 3, 1);
    CHECK(h3.is_clifford);
    CHECK(h3.tableau.has_value());
    const CliffordCheck s3 = is_clifford(sum_gate(3, 3), 3, 2);
    CHECK(s3.is_clifford);
    CHECK(s3.tableau.has_value());
  }
  SUBCASE("tableaux agree with conjugation") {
    for (int d = 2; d <= 3; ++d) {
      const Matrix c = oracle::kron(hadamard(d), Matrix::Identity(d, d)) * sum_gate(d, d);
      const CliffordCheck check = is_clifford(c, d, 2);
      REQUIRE(check.is_clifford);
      for (const PauliProduct& p : enumerate_group(d, 2)) {
        const Matrix expected = c * reference_matrix(p) * c.adjoint();
        CHECK(oracle::max_abs(reference_matrix(apply_tableau(*check.tableau, p)) - expected) < 1e-9);
      }
    }
  }
}

TEST_CASE("tableau composition on random Clifford words") {
  std::mt19937_64 gen(9);
  for (int d = 2; d <= 3; ++d) {
    const std::vector<Matrix> gens{
        oracle::kron(hadamard(d), Matrix::Identity(d, d)),
        oracle::kron(Matrix::Identity(d, d), hadamard(d)),
        oracle::kron(pauli_z(d), Matrix::Identity(d, d)),
        oracle::kron(Matrix::Identity(d, d), pauli_x(d)),
        sum_gate(d, d),
    };
    for (int trial = 0; trial < 10; ++trial) {
      Matrix c1 = Matrix::Identity(d * d, d * d), c2 = c1;
      for (int k = 0; k < 6; ++k) c1 = gens[gen() % gens.size()] * c1;
      for (int k = 0; k < 6; ++k) c2 = gens[gen() % gens.size()] * c2;
      const auto t1 = is_clifford(c1, d, 2), t2 = is_clifford(c2, d, 2), t21 = is_clifford(c2 * c1, d, 2);
      REQUIRE(t1.is_clifford);
      REQUIRE(t2.is_clifford);
      REQUIRE(t21.is_clifford);
      const CliffordTableau composed = compose(*t2.tableau, *t1.tableau);
      for (std::size_t g = 0; g < composed.images.size(); ++g) {
        CHECK(composed.images[g] == t21.tableau->images[g]);
      }
    }
  }
}
