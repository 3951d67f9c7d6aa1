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
#include <optional>
#include <set>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qudcomp/gates.hpp"

namespace qudcomp {

struct QuditDecl {
  int id = 0;
  int dim = 2;
  friend bool operator==(const QuditDecl&, const QuditDecl&) = default;
};

/// A gate applied to qudit ids, listed in the order of `gate.dims`.
struct GateOp {
  GateRef gate;
  std::vector<int> targets;
  friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// Terminal projective measurement of the listed qudits.
struct MeasureOp {
  std::vector<int> targets;
  friend bool operator==(const MeasureOp&, const MeasureOp&) = default;
};

using Operation = std::variant<GateOp, MeasureOp>;

/// Ordered gate list over a mixed-dimension register. Qudit order in
/// `qudits()` fixes the amplitude layout (first qudit most significant).
/// Every mutation is validated: dims must match and nothing may follow a
/// qudit's measurement.
class Circuit {
 public:
  Circuit() = default;
  /// Qudits with ids 0..n−1 and the given dimensions.
  explicit Circuit(const std::vector<int>& dims);

  int add_qudit(int dim);
  void add_qudit(int id, int dim);
  void append(GateRef gate, std::vector<int> targets);
  void append(GateOp op) { append(std::move(op.gate), std::move(op.targets)); }
  void measure(std::vector<int> targets);

  const std::vector<QuditDecl>& qudits() const { return qudits_; }
  const std::vector<Operation>& ops() const { return ops_; }
  std::size_t num_qudits() const { return qudits_.size(); }
  std::vector<int> dims() const;
  long long total_dim() const;
  bool has_qudit(int id) const { return position_.count(id) != 0; }
  /// Index of `id` in the amplitude layout.
  int position(int id) const;
  int dim_of(int id) const;
  bool is_measured(int id) const { return measured_.count(id) != 0; }
  /// Measured ids in the order they were measured.
  std::vector<int> measured_ids() const;
  bool has_measurements() const { return !measured_.empty(); }
  std::size_t gate_count() const;

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.qudits_ == b.qudits_ && a.ops_ == b.ops_;
  }

 private:
  void check_targets(const std::vector<int>& targets) const;

  std::vector<QuditDecl> qudits_;
  std::vector<Operation> ops_;
  std::unordered_map<int, int> position_;
  std::set<int> measured_;
};

/// Qudit-state vertex. `op` is the index into CircuitDag::ops of the
/// operation that produced this state, empty for the initial |0⟩ vertex.
struct DagVertex {
  int qudit = 0;
  std::optional<std::size_t> op;
};

/// Operation edge. `passthrough` marks the identity edge a control takes
/// into its own next vertex; the other edges of a multi-qudit op all enter
/// the vertex of its last target (the join vertex).
struct DagEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t op = 0;
  bool passthrough = false;
};

/// Dependency graph of a circuit with one chain of vertices per qudit.
/// Two-qudit gates create a join vertex with in-degree two. The qubit/qutrit
/// CCNOT (label "ccnot", dims {2,3,2}) is lowered to three two-qudit gates
/// first; any other op of arity k > 2 is kept whole and its join vertex has
/// in-degree k.
struct CircuitDag {
  std::vector<int> ids;
  std::vector<int> dims;
  /// Lowered gate operations in topological order.
  std::vector<GateOp> ops;
  std::vector<DagVertex> vertices;
  std::vector<DagEdge> edges;
  std::vector<int> measured;

  std::vector<std::size_t> in_degree() const;
  /// Kahn's algorithm over the edges; false when a cycle exists.
  bool is_acyclic() const;
};

CircuitDag to_dag(const Circuit& circuit);

/// The three two-qudit gates realising the qubit/qutrit/qubit CCNOT: control
/// promotes the qutrit |1⟩→|2⟩, the qutrit fires X on |2⟩, then uncompute.
std::vector<GateOp> lower_ccnot(int control, int qutrit, int target);

/// Unitary of the CCNOT op, equal to the product of its lowering.
Matrix ccnot_matrix();

}  // namespace qudcomp
