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

#include <vector>

#include "qudcomp/circuit.hpp"

namespace qudcomp {

/// U = diag(L1, L2) · CS(θ) · diag(R1, R2) with CS pairing row i of the top
/// partition with row p+i of the bottom one.
struct Csd2Result {
  Matrix l1, l2, r1, r2;
  /// Ascending, each in [0, π/2]; length min(p, q).
  std::vector<double> theta;
  /// Max-abs reconstruction error.
  double residual = 0.0;
};

/// Two-block cosine-sine decomposition with top partition size `r`. Throws
/// NumericalFailure if the reconstruction misses by more than csd tolerance.
Csd2Result csd2(const Matrix& u, int r, const Tolerances& tol = default_tolerances());

/// Orthogonal cosine-sine matrix of size p+q.
Matrix cs_matrix(const std::vector<double>& theta, int p, int q);

struct CsdFactor {
  enum class Kind { BlockDiag, CosineSine };
  Kind kind = Kind::BlockDiag;
  /// BlockDiag: equal-size blocks tiling the full matrix.
  std::vector<Matrix> blocks;
  /// CosineSine: rows [offset, offset+p) pair with [offset+p, offset+p+q).
  std::vector<double> theta;
  int offset = 0;
  int p = 0;
  int q = 0;

  /// Dense matrix on the full space of dimension `dim`.
  Matrix matrix(long long dim) const;
};

/// Peels a d^n unitary into factors whose ordered product (left to right) is
/// the input. BlockDiag factors hold d blocks of size d^{n−1}, indexed by the
/// leading qudit's value. For n = 1 the single factor is the unitary itself.
std::vector<CsdFactor> csd_qudit(const Matrix& u, int d,
                                 const Tolerances& tol = default_tolerances());

/// Product of the factors on a space of dimension `dim`.
Matrix reconstruct(const std::vector<CsdFactor>& factors, long long dim);

/// Multiplexed single-qudit gates realising the factors on qudits 0..n−1.
/// Block-diagonal factors recurse on their blocks; cosine-sine factors become
/// two-level rotations on the leading qudit selected by the others. Gates
/// whose every branch is the identity are dropped.
Circuit lower_to_circuit(const std::vector<CsdFactor>& factors, int d, int n,
                         const Tolerances& tol = default_tolerances());

/// csd_qudit followed by lower_to_circuit.
Circuit csd_compile(const Matrix& u, int d, const Tolerances& tol = default_tolerances());

}  // namespace qudcomp
