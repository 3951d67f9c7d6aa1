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

#include "qudcomp/builder.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "qudcomp/errors.hpp"

namespace qudcomp {

namespace {

std::uint64_t next_serial() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

std::vector<QuditHandle> to_vector(std::span<const QuditHandle> s) {
  return {s.begin(), s.end()};
}

}  // namespace

Builder::Builder() : serial_(next_serial()) {}

QuditHandle Builder::alloc_qudit(int d) {
  require_dimension(d);
  const int id = static_cast<int>(circuit_.num_qudits());
  circuit_.add_qudit(id, d);
  generation_.push_back(0);
  return {serial_, id, d, 0};
}

std::vector<QuditHandle> Builder::alloc_register(int d, int n) {
  require_dimension(d);
  if (n < 1) throw InvalidArgument("register needs at least one qudit");
  std::vector<QuditHandle> out;
  for (int i = 0; i < n; ++i) out.push_back(alloc_qudit(d));
  return out;
}

std::vector<QuditHandle> Builder::consume(std::span<const QuditHandle> handles) {
  for (std::size_t i = 0; i < handles.size(); ++i) {
    const QuditHandle& h = handles[i];
    if (h.builder != serial_) {
      throw LinearityViolation("handle for qudit " + std::to_string(h.id) +
                               " belongs to a different builder");
    }
    if (h.id < 0 || static_cast<std::size_t>(h.id) >= generation_.size()) {
      throw LinearityViolation("unknown qudit " + std::to_string(h.id));
    }
    if (h.generation != generation_[h.id]) {
      throw LinearityViolation("qudit " + std::to_string(h.id) +
                               " handle was already consumed (generation " +
                               std::to_string(h.generation) + ", live " +
                               std::to_string(generation_[h.id]) + ")");
    }
    if (h.dim != circuit_.dim_of(h.id)) {
      throw LinearityViolation("handle dimension does not match qudit " +
                               std::to_string(h.id));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (handles[j].id == h.id) {
        throw LinearityViolation("qudit " + std::to_string(h.id) +
                                 " used twice in one operation");
      }
    }
    if (circuit_.is_measured(h.id)) {
      throw MeasurementError("qudit " + std::to_string(h.id) + " was already measured");
    }
  }
  std::vector<QuditHandle> fresh;
  fresh.reserve(handles.size());
  for (const QuditHandle& h : handles) {
    fresh.push_back({serial_, h.id, h.dim, ++generation_[h.id]});
  }
  return fresh;
}

std::vector<QuditHandle> Builder::apply(const GateRef& gate,
                                        std::span<const QuditHandle> targets) {
  std::vector<int> ids;
  for (const QuditHandle& h : targets) ids.push_back(h.id);
  if (gate.dims.size() != targets.size()) {
    throw ShapeMismatch(std::string(to_string(gate.kind)) + " expects " +
                        std::to_string(gate.dims.size()) + " qudits, got " +
                        std::to_string(targets.size()));
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].dim != gate.dims[i]) {
      throw ShapeMismatch(std::string(to_string(gate.kind)) + " expects dimension " +
                          std::to_string(gate.dims[i]) + ", handle has dimension " +
                          std::to_string(targets[i].dim));
    }
  }
  gate.validate();
  std::vector<QuditHandle> fresh = consume(targets);
  circuit_.append(gate, std::move(ids));
  return fresh;
}

QuditHandle Builder::apply(const GateRef& gate, const QuditHandle& target) {
  return apply(gate, std::span<const QuditHandle>(&target, 1)).front();
}

QuditHandle Builder::hadamard(const QuditHandle& q) { return apply(GateRef::h(q.dim), q); }

std::vector<QuditHandle> Builder::hadamard(std::span<const QuditHandle> qs) {
  std::vector<QuditHandle> out;
  for (const QuditHandle& q : qs) out.push_back(hadamard(q));
  return out;
}

QuditHandle Builder::x(const QuditHandle& q) { return apply(GateRef::x(q.dim), q); }

std::vector<QuditHandle> Builder::x(std::span<const QuditHandle> qs) {
  std::vector<QuditHandle> out;
  for (const QuditHandle& q : qs) out.push_back(x(q));
  return out;
}

std::pair<QuditHandle, QuditHandle> Builder::sum(const QuditHandle& control,
                                                 const QuditHandle& target) {
  const std::array<QuditHandle, 2> pair{control, target};
  const auto out = apply(GateRef::sum(control.dim, target.dim), pair);
  return {out[0], out[1]};
}

std::pair<std::vector<QuditHandle>, MeasureMarker> Builder::measure(
    std::span<const QuditHandle> targets) {
  if (targets.empty()) throw InvalidArgument("measure needs at least one qudit");
  for (const QuditHandle& h : targets) {
    if (h.builder == serial_ && h.id >= 0 &&
        static_cast<std::size_t>(h.id) < generation_.size() &&
        circuit_.is_measured(h.id)) {
      throw MeasurementError("qudit " + std::to_string(h.id) + " measured twice");
    }
  }
  std::vector<QuditHandle> fresh = consume(targets);
  std::vector<int> ids;
  for (const QuditHandle& h : targets) ids.push_back(h.id);
  MeasureMarker marker{ids, circuit_.ops().size()};
  circuit_.measure(std::move(ids));
  return {std::move(fresh), std::move(marker)};
}

std::vector<GateOp> qft_ops(int d, int n) {
  require_dimension(d);
  if (n < 1) throw InvalidArgument("QFT needs at least one qudit");
  std::vector<GateOp> ops;
  for (int j = 0; j < n; ++j) {
    ops.push_back({GateRef::h(d), {j}});
    for (int k = j + 1; k < n; ++k) {
      // Control value c on qudit k multiplies target digit y by
      // exp(2πi y c / d^{k−j+1}).
      const double denom = std::pow(static_cast<double>(d), k - j + 1);
      Matrix phase = Matrix::Zero(d, d);
      for (int y = 0; y < d; ++y) {
        phase(y, y) = std::polar(1.0, 2.0 * std::numbers::pi * y / denom);
      }
      GateRef g = GateRef::controlled(phase, d, {d});
      g.label = "cphase";
      ops.push_back({std::move(g), {k, j}});
    }
  }
  for (int j = 0; j < n / 2; ++j) {
    ops.push_back({GateRef::custom(swap_gate(d), {d, d}, "swap"), {j, n - 1 - j}});
  }
  return ops;
}

namespace {

int uniform_dim(std::span<const QuditHandle> targets, const char* what) {
  if (targets.empty()) throw InvalidArgument(std::string(what) + " needs qudits");
  const int d = targets.front().dim;
  for (const QuditHandle& h : targets) {
    if (h.dim != d) {
      throw ShapeMismatch(std::string(what) + " requires qudits of one dimension");
    }
  }
  return d;
}

}  // namespace

std::vector<QuditHandle> Builder::qft(std::span<const QuditHandle> targets) {
  const int d = uniform_dim(targets, "QFT");
  std::vector<QuditHandle> live = to_vector(targets);
  consume(targets);  // rejects stale or duplicate handles up front
  for (QuditHandle& h : live) h.generation = generation_[h.id];
  for (const GateOp& op : qft_ops(d, static_cast<int>(live.size()))) {
    std::vector<QuditHandle> args;
    for (int local : op.targets) args.push_back(live[local]);
    const auto fresh = apply(op.gate, args);
    for (std::size_t i = 0; i < op.targets.size(); ++i) live[op.targets[i]] = fresh[i];
  }
  return live;
}

std::vector<QuditHandle> Builder::inverse_qft(std::span<const QuditHandle> targets) {
  const int d = uniform_dim(targets, "inverse QFT");
  std::vector<QuditHandle> live = to_vector(targets);
  consume(targets);
  for (QuditHandle& h : live) h.generation = generation_[h.id];
  const std::vector<GateOp> ops = qft_ops(d, static_cast<int>(live.size()));
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    std::vector<QuditHandle> args;
    for (int local : it->targets) args.push_back(live[local]);
    const auto fresh = apply(adjoint(it->gate), args);
    for (std::size_t i = 0; i < it->targets.size(); ++i) live[it->targets[i]] = fresh[i];
  }
  return live;
}

std::pair<std::vector<QuditHandle>, std::vector<QuditHandle>> Builder::qpe(
    const Matrix& u, std::span<const QuditHandle> controls,
    std::span<const QuditHandle> targets) {
  const int d = uniform_dim(controls, "QPE controls");
  if (targets.empty()) throw InvalidArgument("QPE needs target qudits");
  std::vector<int> target_dims;
  long long target_size = 1;
  for (const QuditHandle& h : targets) {
    target_dims.push_back(h.dim);
    target_size *= h.dim;
  }
  if (u.rows() != target_size || u.cols() != target_size) {
    throw ShapeMismatch("QPE unitary does not match the target register");
  }
  require_unitary(u, "QPE unitary", default_tolerances().unitarity);

  std::vector<QuditHandle> ctl = hadamard(controls);
  std::vector<QuditHandle> tgt = to_vector(targets);
  const int t = static_cast<int>(ctl.size());
  for (int k = 0; k < t; ++k) {
    const Matrix power = matrix_power(u, int_pow(d, t - 1 - k));
    std::vector<QuditHandle> args{ctl[k]};
    args.insert(args.end(), tgt.begin(), tgt.end());
    const auto fresh = apply(GateRef::controlled(power, d, target_dims), args);
    ctl[k] = fresh[0];
    std::copy(fresh.begin() + 1, fresh.end(), tgt.begin());
  }
  ctl = inverse_qft(ctl);
  return {std::move(ctl), std::move(tgt)};
}

std::array<QuditHandle, 3> Builder::ccnot(const QuditHandle& control,
                                          const QuditHandle& qutrit,
                                          const QuditHandle& target) {
  const std::array<QuditHandle, 3> args{control, qutrit, target};
  const auto out = apply(GateRef::custom(ccnot_matrix(), {2, 3, 2}, "ccnot"), args);
  return {out[0], out[1], out[2]};
}

}  // namespace qudcomp
