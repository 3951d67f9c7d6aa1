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

#include "qudcomp/gates.hpp"

#include <cmath>
#include <numbers>

#include "qudcomp/errors.hpp"

namespace qudcomp {

namespace {

Complex root_of_unity(long long k, long long n) {
  const long long r = ((k % n) + n) % n;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) /
                             static_cast<double>(n));
}

}  // namespace

Matrix pauli_x(int d) {
  require_dimension(d);
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m(j, (j + 1) % d) = 1.0;
  return m;
}

Matrix pauli_z(int d) {
  require_dimension(d);
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m(j, j) = root_of_unity(j, d);
  return m;
}

Matrix pauli_y(int d) { return pauli_x(d) * pauli_z(d); }

Matrix hadamard(int d) {
  require_dimension(d);
  Matrix m(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) m(j, k) = norm * root_of_unity(static_cast<long long>(j) * k, d);
  }
  return m;
}

Matrix tgate(int d) {
  require_dimension(d);
  const long long n = static_cast<long long>(d) * d * d;
  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) m(j, j) = root_of_unity(j, n);
  return m;
}

Matrix sum_gate(int d_control, int d_target) {
  require_dimension(d_control);
  require_dimension(d_target);
  const int n = d_control * d_target;
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < d_control; ++i) {
    for (int j = 0; j < d_target; ++j) {
      m(i * d_target + (i + j) % d_target, i * d_target + j) = 1.0;
    }
  }
  return m;
}

Matrix controlled_power(const Matrix& u, int d_control) {
  require_dimension(d_control);
  require_unitary(u, "controlled_power", default_tolerances().unitarity);
  const Eigen::Index k = u.rows();
  Matrix m = Matrix::Zero(k * d_control, k * d_control);
  Matrix p = Matrix::Identity(k, k);
  for (int j = 0; j < d_control; ++j) {
    m.block(j * k, j * k, k, k) = p;
    p = p * u;
  }
  return m;
}

Matrix multiplexer(std::span<const Matrix> blocks, int control_dim) {
  require_dimension(control_dim);
  if (blocks.size() != static_cast<std::size_t>(control_dim)) {
    throw ShapeMismatch("multiplexer needs one block per control value: got " +
                        std::to_string(blocks.size()) + " blocks for dimension " +
                        std::to_string(control_dim));
  }
  const Eigen::Index k = blocks.front().rows();
  Matrix m = Matrix::Zero(k * control_dim, k * control_dim);
  for (int j = 0; j < control_dim; ++j) {
    if (blocks[j].rows() != k || blocks[j].cols() != k) {
      throw ShapeMismatch("multiplexer blocks must share one square size");
    }
    require_unitary(blocks[j], "multiplexer block", default_tolerances().unitarity);
    m.block(j * k, j * k, k, k) = blocks[j];
  }
  return m;
}

Matrix two_level_rotation(int d, int a, double theta) {
  require_dimension(d);
  if (a < 0 || a + 1 >= d) throw InvalidArgument("two_level_rotation: level out of range");
  Matrix m = Matrix::Identity(d, d);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  m(a, a) = c;
  m(a, a + 1) = -s;
  m(a + 1, a) = s;
  m(a + 1, a + 1) = c;
  return m;
}

Matrix swap_gate(int d) {
  require_dimension(d);
  Matrix m = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(j * d + i, i * d + j) = 1.0;
  }
  return m;
}

// ---------------------------------------------------------------------------

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::Y: return "Y";
    case GateKind::H: return "H";
    case GateKind::Hdag: return "Hdag";
    case GateKind::T: return "T";
    case GateKind::Tdag: return "Tdag";
    case GateKind::SUM: return "SUM";
    case GateKind::ControlledU: return "ControlledU";
    case GateKind::Multiplexer: return "Multiplexer";
    case GateKind::Custom: return "Custom";
  }
  return "Custom";
}

GateKind gate_kind_from_string(const std::string& name) {
  static const GateKind all[] = {
      GateKind::X,    GateKind::Z,           GateKind::Y,
      GateKind::H,    GateKind::Hdag,        GateKind::T,
      GateKind::Tdag, GateKind::SUM,         GateKind::ControlledU,
      GateKind::Multiplexer, GateKind::Custom};
  for (GateKind k : all) {
    if (name == to_string(k)) return k;
  }
  throw ParseError("unknown gate kind '" + name + "'");
}

GateRef GateRef::x(int d, int power) {
  require_dimension(d);
  return {.kind = GateKind::X, .dims = {d}, .power = power};
}
GateRef GateRef::z(int d, int power) {
  require_dimension(d);
  return {.kind = GateKind::Z, .dims = {d}, .power = power};
}
GateRef GateRef::y(int d) {
  require_dimension(d);
  return {.kind = GateKind::Y, .dims = {d}};
}
GateRef GateRef::h(int d) {
  require_dimension(d);
  return {.kind = GateKind::H, .dims = {d}};
}
GateRef GateRef::hdag(int d) {
  require_dimension(d);
  return {.kind = GateKind::Hdag, .dims = {d}};
}
GateRef GateRef::t(int d, int power) {
  require_dimension(d);
  return {.kind = GateKind::T, .dims = {d}, .power = power};
}
GateRef GateRef::tdag(int d) {
  require_dimension(d);
  return {.kind = GateKind::Tdag, .dims = {d}};
}
GateRef GateRef::sum(int d_control, int d_target) {
  require_dimension(d_control);
  require_dimension(d_target);
  return {.kind = GateKind::SUM, .dims = {d_control, d_target}};
}

GateRef GateRef::controlled(const Matrix& u, int d_control,
                            std::vector<int> target_dims) {
  GateRef g{.kind = GateKind::ControlledU};
  g.dims.push_back(d_control);
  g.dims.insert(g.dims.end(), target_dims.begin(), target_dims.end());
  g.payload = u;
  g.validate();
  return g;
}

GateRef GateRef::mux(std::vector<Matrix> blocks, std::vector<int> control_dims,
                     int target_dim) {
  GateRef g{.kind = GateKind::Multiplexer, .dims = std::move(control_dims)};
  g.dims.push_back(target_dim);
  g.control_map = std::move(blocks);
  g.validate();
  return g;
}

GateRef GateRef::custom(const Matrix& u, std::vector<int> dims, std::string label) {
  GateRef g{.kind = GateKind::Custom, .dims = std::move(dims)};
  g.payload = u;
  g.label = std::move(label);
  g.validate();
  return g;
}

long long GateRef::total_dim() const {
  long long n = 1;
  for (int d : dims) n *= d;
  return n;
}

bool GateRef::is_elementary() const {
  switch (kind) {
    case GateKind::X:
    case GateKind::Z:
    case GateKind::Y:
    case GateKind::H:
    case GateKind::Hdag:
    case GateKind::T:
    case GateKind::Tdag:
      return true;
    default:
      return false;
  }
}

void GateRef::validate(const Tolerances& tol) const {
  if (dims.empty()) throw InvalidArgument("gate has no dimensions");
  for (int d : dims) require_dimension(d);
  const std::string name = to_string(kind);
  if (is_elementary() && dims.size() != 1) {
    throw ShapeMismatch(name + " acts on exactly one qudit");
  }
  switch (kind) {
    case GateKind::SUM:
      if (dims.size() != 2) throw ShapeMismatch("SUM acts on exactly two qudits");
      break;
    case GateKind::ControlledU: {
      if (dims.size() < 2) throw ShapeMismatch("ControlledU needs a control and a target");
      if (!payload) throw InvalidArgument("ControlledU needs a payload");
      const long long target = total_dim() / dims.front();
      if (payload->rows() != target || payload->cols() != target) {
        throw ShapeMismatch("ControlledU payload size does not match target dims");
      }
      require_unitary(*payload, "ControlledU payload", tol.unitarity);
      break;
    }
    case GateKind::Multiplexer: {
      if (dims.size() < 2) throw ShapeMismatch("Multiplexer needs a control and a target");
      const long long controls = total_dim() / dims.back();
      if (control_map.size() != static_cast<std::size_t>(controls)) {
        throw ShapeMismatch("Multiplexer needs one entry per control value (" +
                            std::to_string(controls) + "), got " +
                            std::to_string(control_map.size()));
      }
      for (const Matrix& m : control_map) {
        if (m.rows() != dims.back() || m.cols() != dims.back()) {
          throw ShapeMismatch("Multiplexer branch size does not match target dim");
        }
        require_unitary(m, "Multiplexer branch", tol.unitarity);
      }
      if (!branch_words.empty() && branch_words.size() != control_map.size()) {
        throw ShapeMismatch("Multiplexer branch_words must match control_map");
      }
      break;
    }
    case GateKind::Custom:
      if (!payload) throw InvalidArgument("Custom gate needs a payload");
      if (payload->rows() != total_dim() || payload->cols() != total_dim()) {
        throw ShapeMismatch("Custom payload size does not match dims");
      }
      require_unitary(*payload, "Custom payload", tol.unitarity);
      break;
    default:
      break;
  }
}

Matrix GateRef::matrix() const {
  Matrix base;
  switch (kind) {
    case GateKind::X: base = pauli_x(dims.at(0)); break;
    case GateKind::Z: base = pauli_z(dims.at(0)); break;
    case GateKind::Y: base = pauli_y(dims.at(0)); break;
    case GateKind::H: base = hadamard(dims.at(0)); break;
    case GateKind::Hdag: base = hadamard(dims.at(0)).adjoint(); break;
    case GateKind::T: base = tgate(dims.at(0)); break;
    case GateKind::Tdag: base = tgate(dims.at(0)).adjoint(); break;
    case GateKind::SUM: base = sum_gate(dims.at(0), dims.at(1)); break;
    case GateKind::ControlledU:
      if (!payload) throw InvalidArgument("ControlledU needs a payload");
      base = controlled_power(*payload, dims.front());
      break;
    case GateKind::Multiplexer: {
      const Eigen::Index k = dims.back();
      const auto n = static_cast<Eigen::Index>(control_map.size());
      base = Matrix::Zero(n * k, n * k);
      for (Eigen::Index j = 0; j < n; ++j) base.block(j * k, j * k, k, k) = control_map[j];
      break;
    }
    case GateKind::Custom:
      if (!payload) throw InvalidArgument("Custom gate needs a payload");
      base = *payload;
      break;
  }
  return power == 1 ? base : matrix_power(base, power);
}

bool operator==(const GateRef& a, const GateRef& b) {
  auto same = [](const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  if (a.kind != b.kind || a.dims != b.dims || a.power != b.power ||
      a.label != b.label || a.branch_words != b.branch_words ||
      a.payload.has_value() != b.payload.has_value() ||
      a.control_map.size() != b.control_map.size()) {
    return false;
  }
  if (a.payload && !same(*a.payload, *b.payload)) return false;
  for (std::size_t i = 0; i < a.control_map.size(); ++i) {
    if (!same(a.control_map[i], b.control_map[i])) return false;
  }
  return true;
}

GateRef adjoint(const GateRef& g) {
  GateRef r = g;
  switch (g.kind) {
    case GateKind::H: r.kind = GateKind::Hdag; break;
    case GateKind::Hdag: r.kind = GateKind::H; break;
    case GateKind::T: r.kind = GateKind::Tdag; break;
    case GateKind::Tdag: r.kind = GateKind::T; break;
    case GateKind::X:
    case GateKind::Z:
    case GateKind::Y:
    case GateKind::SUM:
      r.power = -g.power;
      break;
    case GateKind::ControlledU:
    case GateKind::Custom:
      r.payload = g.payload->adjoint();
      break;
    case GateKind::Multiplexer:
      for (Matrix& m : r.control_map) m = m.adjoint().eval();
      for (auto& word : r.branch_words) {
        std::vector<GateKind> inv;
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
          GateRef letter{.kind = *it, .dims = {g.dims.back()}};
          inv.push_back(adjoint(letter).kind);
        }
        word = std::move(inv);
      }
      break;
  }
  return r;
}

}  // namespace qudcomp
