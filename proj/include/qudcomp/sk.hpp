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
#include <string>
#include <utility>
#include <vector>

#include "qudcomp/gates.hpp"

namespace qudcomp {

/// One generator of a basis set. `targets` are positions inside the
/// register the basis acts on (a single position for one qudit).
struct BasisLetter {
  std::string name;
  Matrix matrix;
  GateRef gate;
  std::vector<int> targets;
  /// Index of the letter whose matrix is the exact inverse of this one.
  int inverse = -1;
};

/// Finite gate set closed under inverses, acting on a register of
/// `qudit_dims` (a single entry for single-qudit bases).
class BasisSet {
 public:
  BasisSet() = default;
  /// Resolves inverses by exact matrix match; throws InvalidArgument if the
  /// set is empty or some letter has no inverse in the set.
  BasisSet(std::vector<int> qudit_dims, std::vector<BasisLetter> letters);

  /// {H, T, T†} for d = 2, {H, H†, T, T†} otherwise.
  static BasisSet standard(int d);
  /// H, H†, T, T† on every qudit of an n-qudit register plus SUM and its
  /// inverse on every ordered pair.
  static BasisSet multi_qudit(int d, int n);

  int dim() const { return dim_; }
  const std::vector<int>& qudit_dims() const { return qudit_dims_; }
  const std::vector<BasisLetter>& letters() const { return letters_; }
  const BasisLetter& letter(int i) const { return letters_.at(i); }
  int size() const { return static_cast<int>(letters_.size()); }
  int inverse(int i) const { return letters_.at(i).inverse; }
  /// Stable fingerprint of the letter matrices, used to validate saved
  /// tables.
  std::string fingerprint() const;

 private:
  int dim_ = 0;
  std::vector<int> qudit_dims_;
  std::vector<BasisLetter> letters_;
};

/// Product of basis letters. The matrix is letters[0]·letters[1]·…, so the
/// last letter acts first on a state.
struct GateWord {
  std::vector<int> letters;
  Matrix matrix;

  static GateWord identity(const BasisSet& basis);
  static GateWord from_letters(const BasisSet& basis, std::vector<int> letters);

  std::size_t length() const { return letters.size(); }
  /// Per-letter occurrence counts keyed by letter name.
  std::vector<std::pair<std::string, int>> letter_counts(const BasisSet& basis) const;
};

/// Cancels adjacent letter/inverse pairs. The matrix is left as is since
/// the product is unchanged.
void free_reduce(GateWord& w, const BasisSet& basis);

GateWord concat(const GateWord& a, const GateWord& b, const BasisSet& basis);
GateWord inverse(const GateWord& w, const BasisSet& basis);

struct TableOptions {
  /// Upper bound on stored entries; exceeding it raises SizeGuard.
  std::size_t max_entries = 4000000;
  /// Haar targets used to measure the net radius.
  int epsilon_samples = 1000;
  std::uint64_t epsilon_seed = 20260101;
};

/// ε-net of distinct (up to phase) words, ordered by length and then
/// lexicographically by letters.
class ApproximationTable {
 public:
  ApproximationTable() = default;
  ApproximationTable(BasisSet basis, int max_len, std::vector<GateWord> entries,
                     double epsilon0);

  int dim() const { return basis_.dim(); }
  const BasisSet& basis() const { return basis_; }
  int max_word_length() const { return max_len_; }
  const std::vector<GateWord>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double achieved_epsilon0() const { return epsilon0_; }

  /// Index and distance of the closest entry; ties go to the lower index,
  /// i.e. the shorter and then lexicographically smaller word.
  std::pair<std::size_t, double> nearest_index(const Matrix& u) const;
  const GateWord& nearest(const Matrix& u) const;

  /// Largest nearest-entry distance over the given targets.
  double measure_radius(const std::vector<Matrix>& targets) const;

 private:
  struct VpNode {
    std::size_t point = 0;
    double radius = 0.0;
    int inside = -1;
    int outside = -1;
    /// Leaf bucket [begin, end) into leaf_items_ when point is unused.
    std::size_t begin = 0;
    std::size_t end = 0;
    bool leaf = false;
  };

  void build_index();
  int build_node(std::vector<std::size_t>& items, std::size_t lo, std::size_t hi);
  void search(int node, const Matrix& u, std::size_t& best, double& best_d) const;

  BasisSet basis_;
  int max_len_ = 0;
  std::vector<GateWord> entries_;
  double epsilon0_ = 0.0;
  std::vector<VpNode> nodes_;
  std::vector<std::size_t> leaf_items_;
  int root_ = -1;
};

/// Breadth-first enumeration of freely reduced words up to `max_len`,
/// keeping the first word of each phase class (within dedup tolerance).
ApproximationTable build_table(const BasisSet& basis, int max_len,
                               const TableOptions& opts = {},
                               const Tolerances& tol = default_tolerances());

/// Writes the table as JSON (entries stored as letter lists).
void save_table(const ApproximationTable& table, const std::string& path);
/// Reads a table written by save_table. Throws ParseError if the file is
/// malformed or was built for a different basis.
ApproximationTable load_table(const std::string& path, const BasisSet& basis);

struct CommutatorPair {
  Matrix v;
  Matrix w;
  /// Global phase p with V W V† W† = p · Δ.
  Complex phase{1.0, 0.0};
  /// max-abs error of the commutator against p · Δ.
  double residual = 0.0;
};

/// Balanced group commutator: V W V† W† equals Δ up to a d-th root of unity
/// (exactly when det Δ = 1 and Δ is near I), with dist(V, I) and dist(W, I)
/// of order √dist(Δ, I). Throws ConvergenceFailure when dist(Δ, I) is not
/// below the balance threshold.
CommutatorPair approx_decompose(const Matrix& delta,
                                const Tolerances& tol = default_tolerances());

struct SkResult {
  GateWord word;
  /// dist(U, U_k) for k = 0..depth reached.
  std::vector<double> trace;
  double distance = 0.0;
  std::size_t nearest_calls = 0;
};

/// Recursive refinement: U_k = V' W' V'† W'† U_{k−1} where V, W decompose
/// the residual U·U_{k−1}† and primes are depth k−1 approximations. Stops
/// early once the distance reaches `target` (if positive) or zero. Throws
/// ConvergenceFailure carrying the trace if the top-level error grows.
SkResult solovay_kitaev(const ApproximationTable& table, const Matrix& u, int depth,
                        double target = 0.0, const Tolerances& tol = default_tolerances());

}  // namespace qudcomp
