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
#include <span>
#include <string>
#include <vector>

#include "qudcomp/linalg.hpp"

namespace qudcomp {

// ---------------------------------------------------------------------------
// Matrix factories
// ---------------------------------------------------------------------------

/// Generalized shift X = Σ_j |j⟩⟨j+1| (indices mod d), so X|j⟩ = |j−1⟩.
/// With this convention XZ = ω ZX.
Matrix pauli_x(int d);

/// Clock Z = diag(1, ω, …, ω^{d−1}), ω = e^{2πi/d}.
Matrix pauli_z(int d);

/// Y_d := X·Z. det(XZ) = 1 for every d, so no extra phase is attached; at
/// d = 2 this is −iσ_y.
Matrix pauli_y(int d);

/// Fourier matrix F[j,k] = ω^{jk} / √d; the standard Hadamard at d = 2.
Matrix hadamard(int d);

/// diag(ζ^j) with ζ = e^{2πi/d³}. Standard T at d = 2; T^{d²} = Z for all d.
Matrix tgate(int d);

/// |i, j⟩ → |i, (i + j) mod d_target⟩, control first.
Matrix sum_gate(int d_control, int d_target);

/// diag(U⁰, U¹, …, U^{d_control−1}): control value j applies U^j.
Matrix controlled_power(const Matrix& u, int d_control);

/// Block diagonal diag(B₀, …, B_{k−1}); block j applies when the control
/// register holds value j, so `blocks.size()` must equal `control_dim`.
Matrix multiplexer(std::span<const Matrix> blocks, int control_dim);

/// Identity on d levels with [[cos θ, −sin θ], [sin θ, cos θ]] on the
/// levels (a, a+1).
Matrix two_level_rotation(int d, int a, double theta);

/// Exchanges two qudits of the same dimension.
Matrix swap_gate(int d);

// ---------------------------------------------------------------------------
// Symbolic gate descriptor
// ---------------------------------------------------------------------------

enum class GateKind {
  X,
  Z,
  Y,
  H,
  Hdag,
  T,
  Tdag,
  SUM,
  ControlledU,
  Multiplexer,
  Custom
};

const char* to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

/// A named gate with its dimension signature.
///
///  * X, Z, Y, H, Hdag, T, Tdag: dims = {d}.
///  * SUM: dims = {d_control, d_target}.
///  * ControlledU: dims = {d_control, target dims...}, payload acts on the
///    targets; realised by controlled_power.
///  * Multiplexer: dims = {control dims..., d_target}; control_map holds one
///    d_target×d_target matrix per flattened control value (first control
///    most significant).
///  * Custom: payload acts on all dims.
///
/// The realised matrix is the base matrix raised to `power`.
struct GateRef {
  GateKind kind = GateKind::Custom;
  std::vector<int> dims;
  int power = 1;
  std::optional<Matrix> payload;
  std::vector<Matrix> control_map;
  /// Free-form tag for Custom gates ("swap", "ccnot", ...).
  std::string label;
  /// Optional elementary-gate spelling of each multiplexer branch, listed in
  /// application order. Informational; `control_map` stays normative.
  std::vector<std::vector<GateKind>> branch_words;

  static GateRef x(int d, int power = 1);
  static GateRef z(int d, int power = 1);
  static GateRef y(int d);
  static GateRef h(int d);
  static GateRef hdag(int d);
  static GateRef t(int d, int power = 1);
  static GateRef tdag(int d);
  static GateRef sum(int d_control, int d_target);
  static GateRef controlled(const Matrix& u, int d_control,
                            std::vector<int> target_dims);
  static GateRef mux(std::vector<Matrix> blocks, std::vector<int> control_dims,
                     int target_dim);
  static GateRef custom(const Matrix& u, std::vector<int> dims,
                        std::string label = {});

  std::size_t arity() const { return dims.size(); }
  long long total_dim() const;

  /// Checks the invariants (dims ≥ 2, payload unitary and sized to the
  /// target space, one control_map entry per control value). Throws.
  void validate(const Tolerances& tol = default_tolerances()) const;

  Matrix matrix() const;

  /// Single-qudit elementary gate with a fixed matrix (X…Tdag).
  bool is_elementary() const;

  friend bool operator==(const GateRef& a, const GateRef& b);
};

/// Inverse gate, with the same dims and kind family (H ↔ Hdag, T ↔ Tdag,
/// negated power, adjoint payloads).
GateRef adjoint(const GateRef& g);

}  // namespace qudcomp
