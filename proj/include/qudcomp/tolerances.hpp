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

#include <string>

namespace qudcomp {

/// Numerical tolerances shared by every module. Operations take a
/// `const Tolerances&` that defaults to `default_tolerances()`.
struct Tolerances {
  double unitarity = 1e-10;  // ‖U†U − I‖_max accepted as unitary
  double exp_log = 1e-9;     // su_exp(su_log(U)) round trip
  double branch = 1e-8;      // distance of an eigenphase from ±π
  double csd = 1e-9;         // cosine-sine reconstruction residual
  double lower = 1e-8;       // CSD circuit vs input unitary
  double dedup = 1e-8;       // two unitaries equal up to phase
  double clifford = 1e-8;    // Pauli matching in the Clifford check
  double norm = 1e-10;       // state vector norm drift
  double retarget = 1e-8;    // embedded vs original action
  double prune = 1e-12;      // gates this close to identity are dropped
  double balance_threshold = 0.5;  // max dist(Delta, I) for commutator split

  /// Applies overrides of the form "key=value,key=value". Unknown keys and
  /// malformed or non-positive values throw ParseError.
  void apply_overrides(const std::string& spec);
};

/// Process-wide defaults: the built-in values with any overrides from the
/// QUDCOMP_TOL environment variable applied. Initialised once on first use
/// and immutable afterwards.
const Tolerances& default_tolerances();

}  // namespace qudcomp
