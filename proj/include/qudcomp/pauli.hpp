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

#pragma once

#include <optional>
#include <vector>

#include "qudcomp/linalg.hpp"

namespace qudcomp {

/// ω^λ ⊗ᵢ X^{xᵢ} Z^{zᵢ} over n qudits of dimension d, every component in
/// [0, d). With X|k⟩ = |k−1⟩ the single-qudit relation is XZ = ω ZX.
struct PauliProduct {
  int d = 2;
  int lambda = 0;
  std::vector<int> x;
  std::vector<int> z;

  PauliProduct() = default;
  /// Reduces every component mod d. Throws if x and z differ in length.
  PauliProduct(int d, int lambda, std::vector<int> x, std::vector<int> z);

  static PauliProduct identity(int d, int n);
  /// X or Z on qudit `q` of an n-qudit register.
  static PauliProduct x_on(int d, int n, int q);
  static PauliProduct z_on(int d, int n, int q);

  int n() const { return static_cast<int>(x.size()); }

  friend bool operator==(const PauliProduct&, const PauliProduct&) = default;
};

/// Product p1·p2. Moving Z^{z1} past X^{x2} costs ω^{−z1·x2} per qudit.
PauliProduct pauli_mul(const PauliProduct& p1, const PauliProduct& p2);

/// p^k for k ≥ 0.
PauliProduct pauli_pow(const PauliProduct& p, int k);

Matrix matrix_of(const PauliProduct& p);

/// Every (λ, x, z), λ slowest and z fastest. Throws SizeGuard when
/// d^{2n+1} exceeds 10^6.
std::vector<PauliProduct> enumerate_group(int d, int n);

/// Identifies `m` as a Pauli product within `tol` (operator distance
/// max-abs entry), or nothing.
std::optional<PauliProduct> decode_pauli(const Matrix& m, int d, int n,
                                         double tol = default_tolerances().clifford);

/// Images of the generators under conjugation: images[2q] is C X_q C†,
/// images[2q+1] is C Z_q C†.
struct CliffordTableau {
  int d = 2;
  int n = 1;
  std::vector<PauliProduct> images;

  const PauliProduct& image_x(int q) const { return images.at(2 * q); }
  const PauliProduct& image_z(int q) const { return images.at(2 * q + 1); }
};

struct CliffordCheck {
  bool is_clifford = false;
  std::optional<CliffordTableau> tableau;
};

/// Conjugates each generator by C and matches the result against the
/// enumerated group.
CliffordCheck is_clifford(const Matrix& c, int d, int n,
                          double tol = default_tolerances().clifford);

/// C p C† computed from the tableau alone.
PauliProduct apply_tableau(const CliffordTableau& t, const PauliProduct& p);

/// Tableau of C₂C₁ from the tableaux of C₁ and C₂.
CliffordTableau compose(const CliffordTableau& second, const CliffordTableau& first);

}  // namespace qudcomp
