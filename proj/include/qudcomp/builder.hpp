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

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qudcomp/circuit.hpp"

namespace qudcomp {

/// Linear-use token for one qudit. Each operation consumes the handles it is
/// given and returns fresh ones with the next generation; presenting a
/// consumed handle again is a LinearityViolation.
struct QuditHandle {
  std::uint64_t builder = 0;
  int id = 0;
  int dim = 2;
  std::uint64_t generation = 0;
};

struct MeasureMarker {
  std::vector<int> ids;
  std::size_t op_index = 0;
};

/// Circuit builder with no-cloning enforcement. Every qudit starts in |0⟩.
/// Single owner: not safe for concurrent use.
class Builder {
 public:
  Builder();

  QuditHandle alloc_qudit(int d);
  std::vector<QuditHandle> alloc_register(int d, int n);

  /// Appends `gate` on `targets` (in the order of gate.dims) and returns the
  /// reissued handles in the same order.
  std::vector<QuditHandle> apply(const GateRef& gate,
                                 std::span<const QuditHandle> targets);
  QuditHandle apply(const GateRef& gate, const QuditHandle& target);

  QuditHandle hadamard(const QuditHandle& q);
  std::vector<QuditHandle> hadamard(std::span<const QuditHandle> qs);
  QuditHandle x(const QuditHandle& q);
  std::vector<QuditHandle> x(std::span<const QuditHandle> qs);
  std::pair<QuditHandle, QuditHandle> sum(const QuditHandle& control,
                                          const QuditHandle& target);

  std::pair<std::vector<QuditHandle>, MeasureMarker> measure(
      std::span<const QuditHandle> targets);

  /// Fourier transform over d^n on uniform-dimension qudits (first handle
  /// most significant): Fourier gates, controlled phases, then a swap network
  /// reversing the qudit order.
  std::vector<QuditHandle> qft(std::span<const QuditHandle> targets);
  std::vector<QuditHandle> inverse_qft(std::span<const QuditHandle> targets);

  /// Phase estimation of `u` on `targets`: Fourier layer on the controls,
  /// control k applying U^{d^{t−1−k}}, then the inverse transform.
  std::pair<std::vector<QuditHandle>, std::vector<QuditHandle>> qpe(
      const Matrix& u, std::span<const QuditHandle> controls,
      std::span<const QuditHandle> targets);

  /// CCNOT with a qubit and a qutrit (in its {|0⟩,|1⟩} levels) as controls
  /// and a qubit target. Stored as one op, lowered when converting to a DAG.
  std::array<QuditHandle, 3> ccnot(const QuditHandle& control,
                                   const QuditHandle& qutrit,
                                   const QuditHandle& target);

  std::size_t qudit_count() const { return circuit_.num_qudits(); }
  const Circuit& circuit() const { return circuit_; }

 private:
  /// Validates that every handle is live and distinct, then bumps their
  /// generations. Nothing is modified when a check fails.
  std::vector<QuditHandle> consume(std::span<const QuditHandle> handles);

  std::uint64_t serial_;
  Circuit circuit_;
  std::vector<std::uint64_t> generation_;
};

/// The QFT network as a standalone op list on ids 0..n−1.
std::vector<GateOp> qft_ops(int d, int n);

}  // namespace qudcomp
