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

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qudcomp/circuit.hpp"
#include "qudcomp/sk.hpp"

namespace qudcomp {

enum class Method { Csd, Sk, Hybrid };

const char* to_string(Method m);
/// Accepts "csd", "sk" and "hybrid"; throws InvalidArgument otherwise.
Method method_from_string(const std::string& name);

/// Word length used for the shared tables when none is given.
int default_table_length(int d);
int default_multi_table_length(int d, int n);

/// Tables for the standard bases, built on first request and shared by the
/// whole process. `max_len` 0 selects the default length.
std::shared_ptr<const ApproximationTable> standard_table(int d, int max_len = 0);
std::shared_ptr<const ApproximationTable> multi_qudit_table(int d, int n, int max_len = 0);

struct CompileOptions {
  Method method = Method::Hybrid;
  double epsilon = 0.05;
  /// Deepest Solovay-Kitaev level tried per word; shallower levels are used
  /// when they already meet the word tolerance.
  int sk_depth = 4;
  /// Single-qudit table. Null selects standard_table(d).
  std::shared_ptr<const ApproximationTable> table;
  /// Register-wide table for pure SK on more than one qudit. Null selects
  /// multi_qudit_table(d, n).
  std::shared_ptr<const ApproximationTable> multi_table;
  bool cache_enabled = true;
  /// Table words w tried as exact left factors U = w·(w†U), best covered
  /// first, until one recursion meets the tolerance.
  int translations = 64;
};

struct WordApproximation {
  GateWord word;
  double distance = 0.0;
  std::vector<double> trace;
  /// Solovay-Kitaev runs performed (1 when the first attempt succeeded).
  int attempts = 0;
};

/// Approximates `u` to within `target` by a word over the table's basis.
/// Throws SynthesisFailure when no attempt reaches the target.
WordApproximation approximate_word(const ApproximationTable& table, const Matrix& u,
                                   double target, int max_depth, int translations,
                                   const Tolerances& tol = default_tolerances());

/// Appends the gates of `word` in application order; letter target k is
/// mapped to `qudits[k]`.
void append_word(Circuit& circuit, const GateWord& word, const BasisSet& basis,
                 const std::vector<int>& qudits);

struct GateCounts {
  /// H and H† (including letters inside multiplexer branches).
  long long h = 0;
  /// T and T†.
  long long t = 0;
  long long sum = 0;
  long long multiplexer = 0;
  long long other = 0;
};

GateCounts count_gates(const Circuit& circuit);

struct CompileReport {
  Method method = Method::Hybrid;
  int d = 0;
  int n = 0;
  double epsilon = 0.0;
  double csd_ms = 0.0;
  double sk_ms = 0.0;
  double total_ms = 0.0;
  std::size_t csd_factors = 0;
  /// Ops of the lowered CSD circuit before word substitution.
  std::size_t csd_ops = 0;
  GateCounts gates;
  /// Phase-invariant distance between the output contraction and the input;
  /// negative when the register was too large to contract.
  double distance = -1.0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t sk_runs = 0;
  double word_tolerance = 0.0;
};

/// Compiles `u` (size d^n) with opts.method. Csd gives an exact multiplexer
/// circuit; Sk approximates the whole register with one word; Hybrid runs
/// CSD and replaces every single-qudit payload by a word, with phase
/// corrections pushed onto the controls. Throws SynthesisFailure if the
/// verified distance exceeds epsilon (or the CSD tolerance for Csd).
std::pair<Circuit, CompileReport> compile_unitary(const Matrix& u, int d,
                                                  const CompileOptions& opts,
                                                  const Tolerances& tol = default_tolerances());

/// compile_unitary with the hybrid method forced.
std::pair<Circuit, CompileReport> hybrid_compile(const Matrix& u, int d, CompileOptions opts,
                                                 const Tolerances& tol = default_tolerances());

/// Smallest m with e^m ≥ d^n.
int embedding_width(int d, int n, int e);

/// A ⊕ I placed on the leading d^n basis states of e^m.
std::pair<Matrix, int> retarget_unitary(const Matrix& a, int d, int n, int e);

/// Identity of size `size` with A written on rows and columns `placement`.
/// Throws InvalidArgument for out-of-range or repeated indices.
Matrix subspace_choice(const Matrix& a, const std::vector<long long>& placement, long long size);

/// Replaces each qudit of dimension d by ⌈log_e d⌉ wires of dimension e
/// (qudit value v is written in base e, leading placement) and every gate by
/// a compiled circuit for its embedded unitary. Gates whose qudits already
/// have dimension e are copied unchanged. Measurements cover whole groups.
Circuit retarget_circuit(const Circuit& c, int e, const CompileOptions& opts,
                         const Tolerances& tol = default_tolerances());

}  // namespace qudcomp
