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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qudcomp/circuit.hpp"

namespace qudcomp {

/// Amplitudes over a mixed-dimension register, qudit 0 most significant.
struct StateVector {
  std::vector<int> dims;
  Vector amplitudes;

  /// |0…0⟩ on `dims`.
  static StateVector zero(const std::vector<int>& dims);
  /// Basis state with the given digits.
  static StateVector basis(const std::vector<int>& dims, const std::vector<int>& digits);

  long long size() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
  /// Amplitude of the basis state with the given digits.
  Complex at(const std::vector<int>& digits) const;
};

/// Flat index of a digit tuple (first digit most significant).
long long flat_index(const std::vector<int>& dims, const std::vector<int>& digits);
std::vector<int> digits_of(const std::vector<int>& dims, long long index);

/// Applies `u` to the rows of `m` on the register axes `positions` (listed in
/// the order of u's tensor factors). Every column of `m` is transformed, so
/// one call updates a state vector or a whole unitary.
void apply_on_axes(Matrix& m, const std::vector<int>& dims, const Matrix& u,
                   const std::vector<int>& positions);

/// Executes the lowered ops of `dag` in order. Throws NumericalFailure when
/// the norm drifts beyond norm tolerance after any gate.
StateVector run_statevector(const CircuitDag& dag);
StateVector run_statevector(const CircuitDag& dag, StateVector initial);
StateVector run_statevector(const Circuit& circuit);

struct CountsResult {
  long long shots = 0;
  std::uint64_t seed = 0;
  std::string rng = "mt19937_64";
  /// Measured qudit ids, in the digit order of the outcome tuples.
  std::vector<int> measured;
  std::map<std::vector<int>, long long> counts;

  /// Outcome key "d0,d1,…".
  static std::string key(const std::vector<int>& outcome);
};

/// Exact marginal over the `measured` qudits (ids index into `ids`).
std::map<std::vector<int>, double> marginal(const StateVector& state,
                                            const std::vector<int>& ids,
                                            const std::vector<int>& measured);

/// Draws `shots` outcomes from the exact marginal without collapsing the
/// state. Deterministic in `seed`.
CountsResult sample(const StateVector& state, const std::vector<int>& ids,
                    const std::vector<int>& measured, long long shots, std::uint64_t seed);

/// Default size cap for contract_to_unitary.
inline constexpr long long kContractGuard = 1LL << 14;

/// Full unitary of a measurement-free circuit, obtained by applying every op
/// to all basis columns at once.
Matrix contract_to_unitary(const Circuit& circuit, long long guard = kContractGuard);

/// Dense I ⊗ … ⊗ u ⊗ … ⊗ I embedding of a gate on arbitrary positions, built
/// by permuting basis states. Reference implementation for small registers.
Matrix embed_dense(const std::vector<int>& dims, const Matrix& u,
                   const std::vector<int>& positions);

}  // namespace qudcomp
