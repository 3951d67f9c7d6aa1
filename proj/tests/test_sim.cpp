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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qudcomp/circuit.hpp"
#include "qudcomp/csd.hpp"
#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"
#include "qudcomp/random.hpp"
#include "qudcomp/sim.hpp"

using namespace qudcomp;

namespace {

long long product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1LL, std::multiplies<>());
}

// Dense operator of `u` acting on register positions `pos`: move those qudits
// to the front, apply u ⊗ I, move them back.
Matrix dense_on(const std::vector<int>& dims, const Matrix& u, const std::vector<int>& pos) {
  std::vector<int> order = pos;
  for (int q = 0; q < static_cast<int>(dims.size()); ++q) {
    if (std::find(pos.begin(), pos.end(), q) == pos.end()) order.push_back(q);
  }
  std::vector<int> permuted;
  for (int q : order) permuted.push_back(dims[q]);
  const long long size = product(dims);
  Matrix p = Matrix::Zero(size, size);
  for (long long col = 0; col < size; ++col) {
    std::vector<int> digits(dims.size());
    long long rest = col;
    for (int q = static_cast<int>(dims.size()) - 1; q >= 0; --q) {
      digits[q] = static_cast<int>(rest % dims[q]);
      rest /= dims[q];
    }
    long long row = 0;
    for (std::size_t i = 0; i < order.size(); ++i) row = row * permuted[i] + digits[order[i]];
    p(row, col) = 1.0;
  }
  const long long local = u.rows();
  const Matrix front = oracle::kron(u, Matrix::Identity(size / local, size / local));
  return p.transpose() * front * p;
}

Circuit fig7() {
  Circuit c({2, 3});
  c.append(GateRef::h(2), {0});
  c.append(GateRef::sum(2, 3), {0, 1});
  return c;
}

}  // namespace

TEST_CASE("state vector basics") {
  const StateVector z = run_statevector(Circuit({2, 3, 4}));
  CHECK(z.size() == 24);
  CHECK(z.amplitudes(0) == Complex{1.0, 0.0});
  CHECK(z.norm() == doctest::Approx(1.0));
  CHECK(flat_index({2, 3, 4}, {1, 2, 3}) == 23);
  CHECK(digits_of({2, 3, 4}, 17) == std::vector<int>{1, 1, 1});
  const StateVector b = StateVector::basis({3, 2}, {2, 1});
  CHECK(b.at({2, 1}) == Complex{1.0, 0.0});
  CHECK_THROWS(StateVector::basis({3, 2}, {3, 0}));
}

TEST_CASE("hand-contracted examples") {
  const StateVector s = run_statevector(fig7());
  const double r = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double expected = (a == b) ? r : 0.0;
      CHECK(std::abs(s.at({a, b}) - expected) < 1e-12);
    }
  }
  Circuit h({3});
  h.append(GateRef::h(3), {0});
  const StateVector hs = run_statevector(h);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(hs.amplitudes(k) - 1.0 / std::sqrt(3.0)) < 1e-12);
}

TEST_CASE("mixed-radix application matches dense Kronecker products") {
  Rng rng(77);
  const std::vector<std::vector<int>> registers{{2, 3}, {3, 2, 2}, {2, 3, 4}, {4, 4, 4}, {5, 3, 2, 2}};
  for (const auto& dims : registers) {
    for (int trial = 0; trial < 8; ++trial) {
      Circuit c(dims);
      Matrix dense = Matrix::Identity(product(dims), product(dims));
      const int n = static_cast<int>(dims.size());
      for (int g = 0; g < 10; ++g) {
        const int a = static_cast<int>(rng.uniform() * n);
        if (rng.uniform() < 0.5) {
          const Matrix u = random_unitary(dims[a], rng);
          c.append(GateRef::custom(u, {dims[a]}), {a});
          dense = dense_on(dims, u, {a}) * dense;
        } else {
          int b = static_cast<int>(rng.uniform() * (n - 1));
          if (b >= a) ++b;
          const Matrix u = random_unitary(dims[a] * dims[b], rng);
          c.append(GateRef::custom(u, {dims[a], dims[b]}), {a, b});
          dense = dense_on(dims, u, {a, b}) * dense;
        }
      }
      const StateVector s = run_statevector(c);
      CHECK(oracle::max_abs(s.amplitudes - dense.col(0)) < 1e-10);
      CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(oracle::max_abs(contract_to_unitary(c) - dense) < 1e-10);
    }
  }
  // The library's own dense embedding agrees with the oracle.
  const Matrix u = random_unitary(6, rng);
  CHECK(oracle::max_abs(embed_dense({2, 4, 3}, u, {2, 0}) - dense_on({2, 4, 3}, u, {2, 0})) < 1e-14);
}

TEST_CASE("initial states and dimension checks") {
  // X lowers the digit by one: X|2⟩ = |1⟩.
  Circuit c({3, 2});
  c.append(GateRef::x(3), {0});
  const StateVector s = run_statevector(to_dag(c), StateVector::basis({3, 2}, {2, 1}));
  CHECK(s.at({1, 1}) == Complex{1.0, 0.0});
  CHECK_THROWS_AS(run_statevector(to_dag(c), StateVector::zero({2, 3})), ShapeMismatch);
}

TEST_CASE("sampling") {
  const StateVector det = StateVector::basis({2, 2}, {1, 0});
  const CountsResult one = sample(det, {0, 1}, {0, 1}, 100, 5);
  CHECK(one.counts.size() == 1);
  CHECK(one.counts.at({1, 0}) == 100);

  const StateVector s = run_statevector(fig7());
  const CountsResult a = sample(s, {0, 1}, {0, 1}, 10000, 42);
  const CountsResult b = sample(s, {0, 1}, {0, 1}, 10000, 42);
  CHECK(a.counts == b.counts);
  long long total = 0;
  for (const auto& [k, v] : a.counts) total += v;
  CHECK(total == 10000);
  const double sigma = std::sqrt(10000 * 0.25);
  CHECK(std::abs(a.counts.at({0, 0}) - 5000.0) <= 3 * sigma);
  CHECK(std::abs(a.counts.at({1, 1}) - 5000.0) <= 3 * sigma);
  CHECK(a.counts.size() == 2);

  // Marginal of one qudit by partial trace.
  const auto m = marginal(s, {0, 1}, {1});
  CHECK(m.at({0}) == doctest::Approx(0.5));
  CHECK(m.at({1}) == doctest::Approx(0.5));
  CHECK(m.count({2}) == 0);
  CHECK(sample(s, {0, 1}, {1}, 50, 1).measured == std::vector<int>{1});
  CHECK(CountsResult::key({1, 0, 2}) == "1,0,2");

  CHECK_THROWS_AS(sample(s, {0, 1}, {7}, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(sample(s, {0, 1}, {0}, 0, 1), InvalidArgument);
}

TEST_CASE("contract_to_unitary") {
  Circuit h({2});
  h.append(GateRef::h(2), {0});
  CHECK(oracle::max_abs(contract_to_unitary(h) - hadamard(2)) < 1e-14);

  Rng rng(3);
  const Matrix v = random_unitary(3, rng);
  const Matrix cu = controlled_power(v, 3);
  const Circuit lowered = csd_compile(cu, 3);
  CHECK(oracle::trace_dist(contract_to_unitary(lowered), cu) < 1e-8);

  Circuit measured({2});
  measured.measure({0});
  CHECK_THROWS_AS(contract_to_unitary(measured), MeasurementError);
  CHECK_THROWS_AS(contract_to_unitary(Circuit({4, 4, 4}), 32), SizeGuard);
}
