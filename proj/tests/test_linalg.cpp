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
#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"
#include "qudcomp/linalg.hpp"
#include "qudcomp/random.hpp"

using namespace qudcomp;

namespace {

std::vector<double> random_coeffs(int n, Rng& rng) {
  std::vector<double> c(n);
  for (double& x : c) x = rng.normal();
  return c;
}

}  // namespace

TEST_CASE("gellmann basis is orthonormal and traceless") {
  for (int d = 2; d <= 6; ++d) {
    const auto basis = gellmann_basis(d);
    REQUIRE(basis.size() == static_cast<std::size_t>(d * d - 1));
    for (std::size_t a = 0; a < basis.size(); ++a) {
      CHECK(std::abs(basis[a].trace()) < 1e-12);
      CHECK(oracle::max_abs(basis[a] - basis[a].adjoint()) < 1e-12);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const Complex t = (basis[a] * basis[b]).trace();
        CHECK(std::abs(t - (a == b ? 2.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("gellmann d=2 is the Pauli triple") {
  const auto b = gellmann_basis(2);
  Matrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  CHECK(oracle::max_abs(b[0] - sx) < 1e-15);
  CHECK(oracle::max_abs(b[1] - sy) < 1e-15);
  CHECK(oracle::max_abs(b[2] - sz) < 1e-15);
  CHECK(gellmann_basis(3).size() == 8);
  CHECK_THROWS_AS(gellmann_basis(1), InvalidDimension);
}

TEST_CASE("structure constants at d=2 are Levi-Civita with zero dsym") {
  const StructureTensors t = structure_constants(2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        CHECK(t.f_at(i, j, k) == doctest::Approx(oracle::levi_civita(i, j, k)).epsilon(1e-14));
        CHECK(std::abs(t.d_at(i, j, k)) < 1e-14);
      }
    }
  }
}

TEST_CASE("structure constants match the trace formulas and symmetries") {
  for (int d = 2; d <= 4; ++d) {
    const auto b = gellmann_basis(d);
    const StructureTensors t = structure_constants(d);
    const int n = d * d - 1;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          // f = tr([Λj,Λk]Λl)/(4i), d = tr({Λj,Λk}Λl)/4 by direct arithmetic.
          const Matrix comm = b[j] * b[k] - b[k] * b[j];
          const Matrix anti = b[j] * b[k] + b[k] * b[j];
          const Complex f = (comm * b[l]).trace() / Complex(0, 4);
          const Complex ds = (anti * b[l]).trace() / 4.0;
          CHECK(std::abs(t.f_at(j, k, l) - f.real()) < 1e-12);
          CHECK(std::abs(t.d_at(j, k, l) - ds.real()) < 1e-12);
          CHECK(std::abs(t.f_at(j, k, l) + t.f_at(k, j, l)) < 1e-12);
          CHECK(std::abs(t.f_at(j, k, l) + t.f_at(j, l, k)) < 1e-12);
          CHECK(std::abs(t.d_at(j, k, l) - t.d_at(j, l, k)) < 1e-12);
        }
      }
      CHECK(t.f_at(j, j, (j + 1) % n) == 0.0);
    }
  }
}

TEST_CASE("cross and dot_sym") {
  Rng rng(5);
  SUBCASE("d=2 basis vectors") {
    const StructureTensors t = structure_constants(2);
    const std::vector<double> ex{1, 0, 0}, ey{0, 1, 0};
    const auto ez = cross(ex, ey, t);
    CHECK(ez[0] == doctest::Approx(0));
    CHECK(ez[1] == doctest::Approx(0));
    CHECK(ez[2] == doctest::Approx(1));
    const auto a = random_coeffs(3, rng), bb = random_coeffs(3, rng);
    for (double x : dot_sym(a, bb, t)) CHECK(std::abs(x) < 1e-14);
  }
  SUBCASE("antisymmetry and symmetry") {
    for (int d = 2; d <= 4; ++d) {
      const StructureTensors t = structure_constants(d);
      const auto a = random_coeffs(d * d - 1, rng), b = random_coeffs(d * d - 1, rng);
      const auto ab = cross(a, b, t), ba = cross(b, a, t), aa = cross(a, a, t);
      const auto sab = dot_sym(a, b, t), sba = dot_sym(b, a, t);
      for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK(std::abs(ab[i] + ba[i]) < 1e-12);
        CHECK(std::abs(aa[i]) < 1e-12);
        CHECK(std::abs(sab[i] - sba[i]) < 1e-12);
      }
    }
  }
  SUBCASE("d=3 A=B=e1 by brute-force contraction") {
    const StructureTensors t = structure_constants(3);
    std::vector<double> e1(8, 0.0);
    e1[1] = 1.0;
    const auto s = dot_sym(e1, e1, t);
    for (int j = 0; j < 8; ++j) CHECK(std::abs(s[j] - t.d_at(j, 1, 1)) < 1e-15);
  }
  SUBCASE("length mismatch") {
    const StructureTensors t = structure_constants(3);
    const std::vector<double> a(8, 1.0), b(3, 1.0);
    CHECK_THROWS_AS(cross(a, b, t), ShapeMismatch);
    CHECK_THROWS_AS(dot_sym(a, b, t), ShapeMismatch);
  }
}

TEST_CASE("product identity (A.L)(B.L) = 2/d (A.B) I + (A*B + i AxB).L") {
  Rng rng(77);
  for (int d = 2; d <= 5; ++d) {
    const StructureTensors t = structure_constants(d);
    const int n = d * d - 1;
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_coeffs(n, rng), b = random_coeffs(n, rng);
      const Matrix lhs = generator_from_coeffs(a, d) * generator_from_coeffs(b, d);
      double ab = 0;
      for (int i = 0; i < n; ++i) ab += a[i] * b[i];
      const auto sym = dot_sym(a, b, t), anti = cross(a, b, t);
      Matrix rhs = (2.0 / d) * ab * Matrix::Identity(d, d);
      const auto basis = gellmann_basis(d);
      for (int j = 0; j < n; ++j) rhs += Complex(sym[j], anti[j]) * basis[j];
      CHECK(oracle::max_abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_CASE("su_log and su_exp") {
  Rng rng(11);
  SUBCASE("identity and pure phase") {
    const SuCoordinates c = su_log(Matrix::Identity(3, 3));
    CHECK(std::abs(c.phase) < 1e-15);
    for (double x : c.coeffs) CHECK(std::abs(x) < 1e-15);
    SuCoordinates phase{std::numbers::pi / 2, {0, 0, 0}};
    CHECK(oracle::max_abs(su_exp(phase, 2) - Complex(0, 1) * Matrix::Identity(2, 2)) < 1e-15);
    SuCoordinates zero{0.0, std::vector<double>(8, 0.0)};
    CHECK(oracle::max_abs(su_exp(zero, 3) - Matrix::Identity(3, 3)) < 1e-15);
  }
  SUBCASE("phase-stripped sigma_z only has a z coefficient") {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    const SuCoordinates c = su_log(z * std::polar(1.0, 0.3));
    CHECK(std::abs(c.coeffs[0]) < 1e-12);
    CHECK(std::abs(c.coeffs[1]) < 1e-12);
    CHECK(std::abs(c.coeffs[2]) > 0.1);
  }
  SUBCASE("round trip on random SU(3) and U(d)") {
    for (int i = 0; i < 100; ++i) {
      const Matrix u = random_special_unitary(3, rng);
      CHECK(oracle::max_abs(su_exp(su_log(u), 3) - u) < 1e-9);
    }
    for (int d = 2; d <= 5; ++d) {
      const Matrix u = random_unitary(d, rng);
      CHECK(oracle::max_abs(su_exp(su_log(u), d) - u) < 1e-9);
    }
  }
  SUBCASE("su_exp is unitary on random coordinates") {
    for (int d : {2, 3}) {
      for (int i = 0; i < 1000; ++i) {
        SuCoordinates c{rng.normal(), random_coeffs(d * d - 1, rng)};
        CHECK(unitarity_error(su_exp(c, d)) < 1e-10);
      }
    }
  }
  SUBCASE("errors") {
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS(su_log(bad), NotUnitary);
    SuCoordinates c{0.0, {1.0}};
    CHECK_THROWS_AS(su_exp(c, 2), ShapeMismatch);
    // det = 1 and one eigenphase exactly at π.
    Matrix cut = Matrix::Zero(3, 3);
    cut(0, 0) = -1.0;
    cut(1, 1) = Complex(0, -1);
    cut(2, 2) = Complex(0, -1);
    CHECK_THROWS_AS(su_log(cut), BranchCut);
  }
}

TEST_CASE("dist is a phase-invariant pseudometric") {
  Rng rng(3);
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(dist(Matrix::Identity(2, 2), sx) == doctest::Approx(1.0));
  for (int d : {2, 3, 4}) {
    for (int i = 0; i < 200; ++i) {
      const Matrix u = random_unitary(d, rng), v = random_unitary(d, rng), w = random_unitary(d, rng);
      CHECK(dist(u, u) < 1e-15);
      CHECK(dist(u, std::polar(1.0, rng.uniform() * 7) * u) < 1e-12);
      CHECK(dist(u, v) >= 0.0);
      CHECK(std::abs(dist(u, v) - dist(v, u)) < 1e-14);
      CHECK(dist(u, w) <= dist(u, v) + dist(v, w) + 1e-12);
      CHECK(std::abs(dist(u, v) - oracle::trace_dist(u, v)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(dist(Matrix::Identity(2, 2), Matrix::Identity(3, 3)), ShapeMismatch);
}
