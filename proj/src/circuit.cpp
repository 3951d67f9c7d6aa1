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

#include "qudcomp/circuit.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "qudcomp/errors.hpp"

namespace qudcomp {

Circuit::Circuit(const std::vector<int>& dims) {
  for (int d : dims) add_qudit(d);
}

int Circuit::add_qudit(int dim) {
  int id = 0;
  for (const QuditDecl& q : qudits_) id = std::max(id, q.id + 1);
  add_qudit(id, dim);
  return id;
}

void Circuit::add_qudit(int id, int dim) {
  require_dimension(dim);
  if (position_.count(id) != 0) {
    throw InvalidArgument("duplicate qudit id " + std::to_string(id));
  }
  position_[id] = static_cast<int>(qudits_.size());
  qudits_.push_back({id, dim});
}

std::vector<int> Circuit::dims() const {
  std::vector<int> out;
  out.reserve(qudits_.size());
  for (const QuditDecl& q : qudits_) out.push_back(q.dim);
  return out;
}

long long Circuit::total_dim() const {
  long long n = 1;
  for (const QuditDecl& q : qudits_) n *= q.dim;
  return n;
}

int Circuit::position(int id) const {
  const auto it = position_.find(id);
  if (it == position_.end()) throw InvalidArgument("unknown qudit id " + std::to_string(id));
  return it->second;
}

int Circuit::dim_of(int id) const { return qudits_[position(id)].dim; }

void Circuit::check_targets(const std::vector<int>& targets) const {
  if (targets.empty()) throw InvalidArgument("operation has no targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    position(targets[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw InvalidArgument("qudit " + std::to_string(targets[i]) +
                              " appears twice in one operation");
      }
    }
    if (is_measured(targets[i])) {
      throw MeasurementError("qudit " + std::to_string(targets[i]) +
                             " was already measured");
    }
  }
}

void Circuit::append(GateRef gate, std::vector<int> targets) {
  check_targets(targets);
  gate.validate();
  if (gate.dims.size() != targets.size()) {
    throw ShapeMismatch(std::string(to_string(gate.kind)) + " expects " +
                        std::to_string(gate.dims.size()) + " targets, got " +
                        std::to_string(targets.size()));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (dim_of(targets[i]) != gate.dims[i]) {
      throw ShapeMismatch(std::string(to_string(gate.kind)) + " expects dimension " +
                          std::to_string(gate.dims[i]) + " on qudit " +
                          std::to_string(targets[i]) + ", which has dimension " +
                          std::to_string(dim_of(targets[i])));
    }
  }
  ops_.push_back(GateOp{std::move(gate), std::move(targets)});
}

void Circuit::measure(std::vector<int> targets) {
  check_targets(targets);
  for (int id : targets) measured_.insert(id);
  ops_.push_back(MeasureOp{std::move(targets)});
}

std::vector<int> Circuit::measured_ids() const {
  std::vector<int> out;
  for (const Operation& op : ops_) {
    if (const auto* m = std::get_if<MeasureOp>(&op)) {
      out.insert(out.end(), m->targets.begin(), m->targets.end());
    }
  }
  return out;
}

std::size_t Circuit::gate_count() const {
  return static_cast<std::size_t>(std::count_if(
      ops_.begin(), ops_.end(),
      [](const Operation& op) { return std::holds_alternative<GateOp>(op); }));
}

// ---------------------------------------------------------------------------

namespace {

Matrix swap_levels_12() {
  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = 1.0;
  p(1, 2) = 1.0;
  p(2, 1) = 1.0;
  return p;
}

bool is_ccnot(const GateRef& g) {
  return g.kind == GateKind::Custom && g.label == "ccnot" &&
         g.dims == std::vector<int>{2, 3, 2};
}

}  // namespace

std::vector<GateOp> lower_ccnot(int control, int qutrit, int target) {
  const GateRef promote = GateRef::controlled(swap_levels_12(), 2, {3});
  const Matrix i2 = Matrix::Identity(2, 2);
  const GateRef fire = GateRef::mux({i2, i2, pauli_x(2)}, {3}, 2);
  return {GateOp{promote, {control, qutrit}}, GateOp{fire, {qutrit, target}},
          GateOp{promote, {control, qutrit}}};
}

Matrix ccnot_matrix() {
  // Basis |a, b, c⟩ with a, c qubits and b a qutrit; index a*6 + b*2 + c.
  Matrix m = Matrix::Zero(12, 12);
  auto promote = [](int a, int b) { return a == 1 && b > 0 ? 3 - b : b; };
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 2; ++c) {
        int bb = promote(a, b);
        const int cc = bb == 2 ? 1 - c : c;
        bb = promote(a, bb);
        m(a * 6 + bb * 2 + cc, a * 6 + b * 2 + c) = 1.0;
      }
    }
  }
  return m;
}

std::vector<std::size_t> CircuitDag::in_degree() const {
  std::vector<std::size_t> deg(vertices.size(), 0);
  for (const DagEdge& e : edges) ++deg[e.to];
  return deg;
}

bool CircuitDag::is_acyclic() const {
  std::vector<std::size_t> deg = in_degree();
  std::vector<std::vector<std::size_t>> out(vertices.size());
  for (const DagEdge& e : edges) out[e.from].push_back(e.to);
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (deg[v] == 0) ready.push_back(v);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop_front();
    ++seen;
    for (std::size_t w : out[v]) {
      if (--deg[w] == 0) ready.push_back(w);
    }
  }
  return seen == vertices.size();
}

CircuitDag to_dag(const Circuit& circuit) {
  CircuitDag dag;
  std::vector<std::size_t> frontier;
  for (const QuditDecl& q : circuit.qudits()) {
    dag.ids.push_back(q.id);
    dag.dims.push_back(q.dim);
    frontier.push_back(dag.vertices.size());
    dag.vertices.push_back({circuit.position(q.id), std::nullopt});
  }
  auto add = [&](const GateOp& op) {
    const std::size_t index = dag.ops.size();
    dag.ops.push_back(op);
    std::vector<std::size_t> previous;
    for (int id : op.targets) previous.push_back(frontier[circuit.position(id)]);
    const std::size_t last = op.targets.size() - 1;
    for (std::size_t i = 0; i < op.targets.size(); ++i) {
      const int pos = circuit.position(op.targets[i]);
      const std::size_t v = dag.vertices.size();
      dag.vertices.push_back({pos, index});
      if (i == last) {
        for (std::size_t j = 0; j < op.targets.size(); ++j) {
          dag.edges.push_back({previous[j], v, index, false});
        }
      } else {
        dag.edges.push_back({previous[i], v, index, true});
      }
      frontier[pos] = v;
    }
    if (op.targets.size() == 1) dag.edges.back().passthrough = false;
  };
  for (const Operation& op : circuit.ops()) {
    if (const auto* g = std::get_if<GateOp>(&op)) {
      if (is_ccnot(g->gate)) {
        for (const GateOp& part : lower_ccnot(g->targets[0], g->targets[1], g->targets[2])) {
          add(part);
        }
      } else {
        add(*g);
      }
    } else {
      const auto& m = std::get<MeasureOp>(op);
      dag.measured.insert(dag.measured.end(), m.targets.begin(), m.targets.end());
    }
  }
  return dag;
}

}  // namespace qudcomp
