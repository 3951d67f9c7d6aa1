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
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qudcomp/csd.hpp"
#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"
#include "qudcomp/random.hpp"
#include "qudcomp/sim.hpp"

using namespace qudcomp;

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

// The C/S pattern written out independently of cs_matrix.
Matrix cs_reference(const std::vector<double>& theta, int p, int q) {
  Matrix m = Matrix::Identity(p + q, p + q);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const int a = static_cast<int>(i), b = p + static_cast<int>(i);
    m(a, a) = m(b, b) = std::cos(theta[i]);
    m(a, b) = -std::sin(theta[i]);
    m(b, a) = std::sin(theta[i]);
  }
  return m;
}

void check_csd2(const Matrix& u, int r) {
  const Csd2Result c = csd2(u, r);
  const int m = static_cast<int>(u.rows());
  const Matrix rebuilt = block_diag(c.l1, c.l2) * cs_reference(c.theta, r, m - r) * block_diag(c.r1, c.r2);
  CHECK(oracle::max_abs(rebuilt - u) <= 1e-9);
  CHECK(c.residual <= 1e-9);
  CHECK(c.theta.size() == static_cast<std::size_t>(std::min(r, m - r)));
  for (std::size_t i = 0; i < c.theta.size(); ++i) {
    CHECK(c.theta[i] >= 0.0);
    CHECK(c.theta[i] <= std::numbers::pi / 2 + 1e-15);
    if (i > 0) CHECK(c.theta[i] >= c.theta[i - 1] - 1e-12);
  }
  for (const Matrix* b : {&c.l1, &c.l2, &c.r1, &c.r2}) CHECK(unitarity_error(*b) < 1e-10);
}

// Structured inputs with repeated or extreme cosine-sine angles.
std::vector<Matrix> structured(int d) {
  std::vector<Matrix> out;
  const Matrix id = Matrix::Identity(d, d);
  out.push_back(Matrix::Identity(d * d, d * d));
  out.push_back(sum_gate(d, d));
  out.push_back(swap_gate(d));
  out.push_back(oracle::kron(hadamard(d), hadamard(d)));
  out.push_back(oracle::kron(pauli_x(d), id));
  out.push_back(oracle::kron(id, pauli_x(d)));
  out.push_back(controlled_power(hadamard(d), d));
  out.push_back(oracle::permutation({d, d}, [d](const std::vector<int>& v) {
    return std::vector<int>{(v[0] + v[1]) % d, (v[1] + 1) % d};
  }));
  return out;
}

}  // namespace

TEST_CASE("csd2 examples") {
  const Csd2Result id = csd2(Matrix::Identity(4, 4), 2);
  CHECK(id.theta == std::vector<double>{0.0, 0.0});
  check_csd2(Matrix::Identity(4, 4), 2);
  const Csd2Result cnot = csd2(sum_gate(2, 2), 2);
  for (double t : cnot.theta) CHECK(std::abs(t) < 1e-12);
  check_csd2(sum_gate(2, 2), 2);

  Rng rng(8);
  for (int i = 0; i < 50; ++i) check_csd2(random_unitary(8, rng), 4);
  // Unequal partitions in both directions.
  for (int r = 1; r < 6; ++r) check_csd2(random_unitary(6, rng), r);
  // Embedded gates: rank-deficient off-diagonal blocks.
  check_csd2(direct_sum(hadamard(3), Matrix::Identity(1, 1)), 2);
  check_csd2(direct_sum(pauli_x(3), Matrix::Identity(1, 1)), 2);
  for (const Matrix& m : structured(3)) {
    check_csd2(m, 3);
    check_csd2(m, 6);
  }
}

TEST_CASE("csd2 errors") {
  Matrix bad = Matrix::Identity(4, 4);
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(csd2(bad, 2), NotUnitary);
  CHECK_THROWS_AS(csd2(Matrix::Identity(4, 4), 0), InvalidArgument);
  CHECK_THROWS_AS(csd2(Matrix::Identity(4, 4), 4), InvalidArgument);
}

TEST_CASE("csd_qudit factor structure and reconstruction") {
  Rng rng(12);
  SUBCASE("identity") {
    for (const CsdFactor& f : csd_qudit(Matrix::Identity(4, 4), 2)) {
      CHECK(oracle::max_abs(f.matrix(4) - Matrix::Identity(4, 4)) < 1e-12);
    }
  }
  SUBCASE("single qudit leaf") {
    const Matrix u = random_unitary(3, rng);
    const auto f = csd_qudit(u, 3);
    REQUIRE(f.size() == 1);
    CHECK(oracle::max_abs(f[0].blocks.at(0) - u) == 0.0);
  }
  SUBCASE("qutrit pair gives 4 block-diagonal and 3 cosine-sine factors") {
    const auto f = csd_qudit(random_unitary(9, rng), 3);
    REQUIRE(f.size() == 7);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto expected = i % 2 == 0 ? CsdFactor::Kind::BlockDiag : CsdFactor::Kind::CosineSine;
      CHECK(f[i].kind == expected);
      if (f[i].kind == CsdFactor::Kind::BlockDiag) {
        CHECK(f[i].blocks.size() == 3);
        for (const Matrix& b : f[i].blocks) {
          CHECK(b.rows() == 3);
          CHECK(unitarity_error(b) < 1e-10);
        }
      } else {
        CHECK(unitarity_error(f[i].matrix(9)) < 1e-12);
      }
    }
  }
  SUBCASE("qubits: three factors per level") {
    for (int n = 2; n <= 4; ++n) {
      const int dim = 1 << n;
      CHECK(csd_qudit(random_unitary(dim, rng), 2).size() == 3);
    }
  }
  SUBCASE("reconstruction on random inputs") {
    for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {2, 4}, {4, 2}, {3, 3}}) {
      long long dim = 1;
      for (int i = 0; i < n; ++i) dim *= d;
      for (int trial = 0; trial < 5; ++trial) {
        const Matrix u = random_unitary(static_cast<int>(dim), rng);
        CHECK(oracle::max_abs(reconstruct(csd_qudit(u, d), dim) - u) <= 1e-9);
      }
    }
  }
  SUBCASE("reconstruction on structured inputs") {
    for (int d = 2; d <= 3; ++d) {
      for (const Matrix& u : structured(d)) {
        CHECK(oracle::max_abs(reconstruct(csd_qudit(u, d), u.rows()) - u) <= 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(csd_qudit(Matrix::Identity(6, 6), 2), InvalidDimension);
}

TEST_CASE("lower_to_circuit reproduces the input under contraction") {
  Rng rng(4);
  SUBCASE("single qudit is one Custom gate") {
    const Matrix u = random_unitary(3, rng);
    const Circuit c = csd_compile(u, 3);
    REQUIRE(c.ops().size() == 1);
    CHECK(std::get<GateOp>(c.ops()[0]).gate.kind == GateKind::Custom);
  }
  SUBCASE("CNOT") {
    const Circuit c = csd_compile(sum_gate(2, 2), 2);
    CHECK(oracle::trace_dist(contract_to_unitary(c), sum_gate(2, 2)) < 1e-8);
  }
  SUBCASE("identity prunes to nothing") {
    CHECK(csd_compile(Matrix::Identity(9, 9), 3).ops().empty());
  }
  SUBCASE("random and structured") {
    for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}, {3, 3}, {5, 2}}) {
      long long dim = 1;
      for (int i = 0; i < n; ++i) dim *= d;
      const Matrix u = random_unitary(static_cast<int>(dim), rng);
      const Circuit c = csd_compile(u, d);
      CHECK(oracle::max_abs(contract_to_unitary(c) - u) < 1e-8);
      for (const Operation& op : c.ops()) {
        const GateRef& g = std::get<GateOp>(op).gate;
        CHECK(g.kind == GateKind::Multiplexer);
        CHECK(g.dims.back() == d);
      }
    }
    for (int d = 2; d <= 3; ++d) {
      for (const Matrix& u : structured(d)) {
        CHECK(oracle::max_abs(contract_to_unitary(csd_compile(u, d)) - u) < 1e-8);
      }
    }
  }
}
