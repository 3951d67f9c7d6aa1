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

#include "qudcomp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qudcomp/errors.hpp"
#include "qudcomp/random.hpp"

namespace qudcomp {

namespace {

long long product(const std::vector<int>& dims) {
  long long n = 1;
  for (int d : dims) n *= d;
  return n;
}

std::vector<long long> strides_of(const std::vector<int>& dims) {
  std::vector<long long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}

std::vector<int> positions_of(const std::vector<int>& ids, const std::vector<int>& targets) {
  std::vector<int> out;
  for (int t : targets) {
    auto it = std::find(ids.begin(), ids.end(), t);
    if (it == ids.end()) throw InvalidArgument("unknown qudit id " + std::to_string(t));
    out.push_back(static_cast<int>(it - ids.begin()));
  }
  return out;
}

}  // namespace

long long flat_index(const std::vector<int>& dims, const std::vector<int>& digits) {
  if (digits.size() != dims.size()) throw ShapeMismatch("digit count does not match dims");
  long long idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims[i]) throw InvalidArgument("digit out of range");
    idx = idx * dims[i] + digits[i];
  }
  return idx;
}

std::vector<int> digits_of(const std::vector<int>& dims, long long index) {
  std::vector<int> out(dims.size());
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    out[i] = static_cast<int>(index % dims[i]);
    index /= dims[i];
  }
  return out;
}

StateVector StateVector::zero(const std::vector<int>& dims) {
  for (int d : dims) require_dimension(d);
  StateVector s{dims, Vector::Zero(product(dims))};
  s.amplitudes(0) = 1.0;
  return s;
}

StateVector StateVector::basis(const std::vector<int>& dims, const std::vector<int>& digits) {
  StateVector s = zero(dims);
  s.amplitudes(0) = 0.0;
  s.amplitudes(flat_index(dims, digits)) = 1.0;
  return s;
}

Complex StateVector::at(const std::vector<int>& digits) const {
  return amplitudes(flat_index(dims, digits));
}

void apply_on_axes(Matrix& m, const std::vector<int>& dims, const Matrix& u,
                   const std::vector<int>& positions) {
  const long long total = product(dims);
  if (m.rows() != total) throw ShapeMismatch("state length does not match dims");
  long long block = 1;
  for (int p : positions) {
    if (p < 0 || p >= static_cast<int>(dims.size())) throw InvalidArgument("axis out of range");
    block *= dims[p];
  }
  if (u.rows() != block || u.cols() != block) {
    throw ShapeMismatch("gate size " + std::to_string(u.rows()) +
                        " does not match target dimension " + std::to_string(block));
  }
  const std::vector<long long> strides = strides_of(dims);
  // Offsets of the gate-local basis states relative to a base index whose
  // target digits are all zero.
  std::vector<long long> offsets(block, 0);
  for (long long g = 0; g < block; ++g) {
    long long rest = g;
    for (int i = static_cast<int>(positions.size()) - 1; i >= 0; --i) {
      const int p = positions[i];
      offsets[g] += (rest % dims[p]) * strides[p];
      rest /= dims[p];
    }
  }
  std::vector<bool> is_target(dims.size(), false);
  for (int p : positions) is_target[p] = true;

  Matrix gathered(block, m.cols());
  for (long long base = 0; base < total; ++base) {
    bool aligned = true;
    for (std::size_t p = 0; p < dims.size() && aligned; ++p) {
      if (is_target[p] && (base / strides[p]) % dims[p] != 0) aligned = false;
    }
    if (!aligned) continue;
    for (long long g = 0; g < block; ++g) gathered.row(g) = m.row(base + offsets[g]);
    gathered = u * gathered;
    for (long long g = 0; g < block; ++g) m.row(base + offsets[g]) = gathered.row(g);
  }
}

StateVector run_statevector(const CircuitDag& dag) {
  return run_statevector(dag, StateVector::zero(dag.dims));
}

StateVector run_statevector(const CircuitDag& dag, StateVector initial) {
  if (initial.dims != dag.dims) throw ShapeMismatch("initial state dims do not match the circuit");
  const double tol = default_tolerances().norm;
  Matrix state = std::move(initial.amplitudes);
  for (std::size_t k = 0; k < dag.ops.size(); ++k) {
    const GateOp& op = dag.ops[k];
    apply_on_axes(state, dag.dims, op.gate.matrix(), positions_of(dag.ids, op.targets));
    const double drift = std::abs(state.norm() - 1.0);
    if (drift > tol) {
      throw NumericalFailure("norm drift " + format_real(drift) + " after op " +
                             std::to_string(k) + " (" + to_string(op.gate.kind) + ")");
    }
  }
  return {dag.dims, state.col(0)};
}

StateVector run_statevector(const Circuit& circuit) { return run_statevector(to_dag(circuit)); }

std::string CountsResult::key(const std::vector<int>& outcome) {
  std::ostringstream os;
  for (std::size_t i = 0; i < outcome.size(); ++i) os << (i ? "," : "") << outcome[i];
  return os.str();
}

std::map<std::vector<int>, double> marginal(const StateVector& state,
                                            const std::vector<int>& ids,
                                            const std::vector<int>& measured) {
  if (ids.size() != state.dims.size()) throw ShapeMismatch("id list does not match state");
  if (measured.empty()) throw InvalidArgument("no qudits to measure");
  const std::vector<int> pos = positions_of(ids, measured);
  std::map<std::vector<int>, double> probs;
  for (long long i = 0; i < state.size(); ++i) {
    const double p = std::norm(state.amplitudes(i));
    if (p == 0.0) continue;
    const std::vector<int> digits = digits_of(state.dims, i);
    std::vector<int> outcome;
    for (int q : pos) outcome.push_back(digits[q]);
    probs[outcome] += p;
  }
  return probs;
}

CountsResult sample(const StateVector& state, const std::vector<int>& ids,
                    const std::vector<int>& measured, long long shots, std::uint64_t seed) {
  if (shots < 1) throw InvalidArgument("shots must be at least 1");
  const std::map<std::vector<int>, double> probs = marginal(state, ids, measured);
  std::vector<std::pair<std::vector<int>, double>> cdf;
  double acc = 0.0;
  for (const auto& [outcome, p] : probs) {
    acc += p;
    cdf.emplace_back(outcome, acc);
  }
  CountsResult result;
  result.shots = shots;
  result.seed = seed;
  result.rng = Rng::kAlgorithm;
  result.measured = measured;
  Rng rng(seed);
  for (long long s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u,
                               [](double v, const auto& e) { return v < e.second; });
    if (it == cdf.end()) --it;
    ++result.counts[it->first];
  }
  return result;
}

Matrix contract_to_unitary(const Circuit& circuit, long long guard) {
  if (circuit.has_measurements()) {
    throw MeasurementError("cannot contract a circuit containing measurements");
  }
  const long long total = circuit.total_dim();
  if (total > guard) {
    throw SizeGuard("circuit dimension " + std::to_string(total) + " exceeds the contraction cap " +
                    std::to_string(guard));
  }
  const CircuitDag dag = to_dag(circuit);
  Matrix u = Matrix::Identity(total, total);
  for (const GateOp& op : dag.ops) {
    apply_on_axes(u, dag.dims, op.gate.matrix(), positions_of(dag.ids, op.targets));
  }
  return u;
}

Matrix embed_dense(const std::vector<int>& dims, const Matrix& u,
                   const std::vector<int>& positions) {
  const long long total = product(dims);
  Matrix out = Matrix::Zero(total, total);
  std::vector<int> target_dims;
  for (int p : positions) target_dims.push_back(dims.at(p));
  for (long long col = 0; col < total; ++col) {
    const std::vector<int> in = digits_of(dims, col);
    std::vector<int> local;
    for (int p : positions) local.push_back(in[p]);
    const long long lc = flat_index(target_dims, local);
    for (long long lr = 0; lr < u.rows(); ++lr) {
      std::vector<int> outd = in;
      const std::vector<int> ld = digits_of(target_dims, lr);
      for (std::size_t i = 0; i < positions.size(); ++i) outd[positions[i]] = ld[i];
      out(flat_index(dims, outd), col) += u(lr, lc);
    }
  }
  return out;
}

}  // namespace qudcomp
