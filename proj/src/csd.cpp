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

#include "qudcomp/csd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"

namespace qudcomp {

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) { return direct_sum(a, b); }

// Decomposition for p ≤ q.
Csd2Result csd2_tall(const Matrix& u, int p) {
  const int m = static_cast<int>(u.rows());
  const int q = m - p;
  const Matrix u11 = u.topLeftCorner(p, p);
  const Matrix u12 = u.topRightCorner(p, q);
  const Matrix u21 = u.bottomLeftCorner(q, p);
  const Matrix u22 = u.bottomRightCorner(q, q);

  Eigen::JacobiSVD<Matrix> svd(u11, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Csd2Result out;
  out.l1 = svd.matrixU();
  out.r1 = svd.matrixV().adjoint();
  const Eigen::VectorXd c = svd.singularValues().cwiseMin(1.0);

  // Columns of U21·R1† are orthogonal with norms sin θ, so a QR factor gives
  // the leading columns of L2 once R's diagonal phases are moved into Q. The
  // columns go in by decreasing norm: a vanishing column processed early
  // would claim an arbitrary direction that a later column still needs.
  const Matrix m21 = u21 * out.r1.adjoint();
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return m21.col(a).norm() > m21.col(b).norm(); });
  Matrix sorted(q, p);
  for (int k = 0; k < p; ++k) sorted.col(k) = m21.col(order[k]);
  Eigen::HouseholderQR<Matrix> qr(sorted);
  const Matrix qfull = qr.householderQ() * Matrix::Identity(q, q);
  const Matrix rr = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  Matrix l2 = qfull;
  Eigen::VectorXd s(p);
  for (int k = 0; k < p; ++k) {
    const int i = order[k];
    const Complex diag = rr(k, k);
    s(i) = std::abs(diag);
    l2.col(i) = qfull.col(k);
    if (s(i) > 0.0) l2.col(i) *= diag / s(i);
  }
  out.l2 = l2;

  out.theta.resize(p);
  for (int i = 0; i < p; ++i) out.theta[i] = std::atan2(s(i), c(i));

  // Rows of R2 from whichever of −S⁻¹L1†U12 and C⁻¹L2†U22 is better
  // conditioned; the trailing rows come straight from L2†U22.
  const Matrix top = out.l1.adjoint() * u12;
  const Matrix bottom = out.l2.adjoint() * u22;
  Matrix r2(q, q);
  for (int i = 0; i < p; ++i) {
    const double ci = std::cos(out.theta[i]);
    const double si = std::sin(out.theta[i]);
    if (si > ci) {
      r2.row(i) = -top.row(i) / si;
    } else {
      r2.row(i) = bottom.row(i) / ci;
    }
  }
  if (q > p) r2.bottomRows(q - p) = bottom.bottomRows(q - p);
  out.r2 = polar_unitary(r2);
  return out;
}

}  // namespace

Matrix cs_matrix(const std::vector<double>& theta, int p, int q) {
  if (static_cast<int>(theta.size()) != std::min(p, q)) {
    throw ShapeMismatch("cosine-sine angle count must be min(p, q)");
  }
  Matrix m = Matrix::Identity(p + q, p + q);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const int a = static_cast<int>(i);
    const int b = p + a;
    const double c = std::cos(theta[i]);
    const double s = std::sin(theta[i]);
    m(a, a) = c;
    m(a, b) = -s;
    m(b, a) = s;
    m(b, b) = c;
  }
  return m;
}

Csd2Result csd2(const Matrix& u, int r, const Tolerances& tol) {
  if (u.rows() != u.cols()) throw ShapeMismatch("csd2 needs a square matrix");
  const int m = static_cast<int>(u.rows());
  if (r <= 0 || r >= m) {
    throw InvalidArgument("csd2 partition " + std::to_string(r) + " outside (0, " +
                          std::to_string(m) + ")");
  }
  require_unitary(u, "csd2 input", tol.unitarity);

  Csd2Result out;
  if (r <= m - r) {
    out = csd2_tall(u, r);
  } else {
    // Swap the partitions, decompose, and swap back. Conjugating the swapped
    // cosine-sine matrix flips the sign of S, absorbed by negating L1, R1.
    const int q = m - r;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
    for (int i = 0; i < m; ++i) perm.indices()[i] = (i < r) ? i + q : i - r;
    const Matrix v = perm * u * perm.transpose();
    const Csd2Result w = csd2_tall(v, q);
    out.l1 = w.l2;
    out.l2 = -w.l1;
    out.r1 = w.r2;
    out.r2 = -w.r1;
    out.theta = w.theta;
  }
  const Matrix rebuilt = block_diag(out.l1, out.l2) * cs_matrix(out.theta, r, m - r) *
                         block_diag(out.r1, out.r2);
  out.residual = (rebuilt - u).cwiseAbs().maxCoeff();
  if (!(out.residual <= tol.csd)) {
    throw NumericalFailure("csd2 reconstruction residual " + format_real(out.residual) +
                           " exceeds " + format_real(tol.csd));
  }
  return out;
}

Matrix CsdFactor::matrix(long long dim) const {
  Matrix out = Matrix::Identity(dim, dim);
  if (kind == Kind::BlockDiag) {
    long long at = 0;
    for (const Matrix& b : blocks) {
      out.block(at, at, b.rows(), b.cols()) = b;
      at += b.rows();
    }
    if (at != dim) throw ShapeMismatch("block-diagonal factor does not tile the space");
  } else {
    if (offset + p + q > dim) throw ShapeMismatch("cosine-sine factor exceeds the space");
    out.block(offset, offset, p + q, p + q) = cs_matrix(theta, p, q);
  }
  return out;
}

Matrix reconstruct(const std::vector<CsdFactor>& factors, long long dim) {
  Matrix out = Matrix::Identity(dim, dim);
  for (const CsdFactor& f : factors) out = out * f.matrix(dim);
  return out;
}

namespace {

CsdFactor block_factor(std::vector<Matrix> blocks) {
  CsdFactor f;
  f.kind = CsdFactor::Kind::BlockDiag;
  f.blocks = std::move(blocks);
  return f;
}

// Factors of an m = k·r0 unitary whose block-diagonal factors have k blocks of
// size r0. `offset` places the cosine-sine spans in the enclosing matrix.
std::vector<CsdFactor> peel(const Matrix& m, int r0, int offset, const Tolerances& tol) {
  const int k = static_cast<int>(m.rows()) / r0;
  if (k == 1) return {block_factor({m})};

  const Csd2Result split = csd2(m, r0, tol);
  const std::vector<CsdFactor> left = peel(split.l2, r0, offset + r0, tol);
  const std::vector<CsdFactor> right = peel(split.r2, r0, offset + r0, tol);
  const Matrix eye = Matrix::Identity(r0, r0);

  auto widen = [&](const CsdFactor& f, const Matrix& lead) {
    if (f.kind == CsdFactor::Kind::CosineSine) return f;
    std::vector<Matrix> blocks{lead};
    blocks.insert(blocks.end(), f.blocks.begin(), f.blocks.end());
    return block_factor(std::move(blocks));
  };

  std::vector<CsdFactor> out;
  for (std::size_t i = 0; i < left.size(); ++i) out.push_back(widen(left[i], i == 0 ? split.l1 : eye));
  CsdFactor cs;
  cs.kind = CsdFactor::Kind::CosineSine;
  cs.theta = split.theta;
  cs.offset = offset;
  cs.p = r0;
  cs.q = static_cast<int>(m.rows()) - r0;
  out.push_back(std::move(cs));
  for (std::size_t i = 0; i < right.size(); ++i) out.push_back(widen(right[i], i == 0 ? split.r1 : eye));
  return out;
}

bool near_identity(const Matrix& m, double tol) {
  return (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

// Emits gates for a family of d^{|qudits|} unitaries selected by the joint
// value of `controls`. Ops are appended in application order.
void lower_family(const std::vector<Matrix>& family, const std::vector<int>& controls,
                  const std::vector<int>& qudits, int d, const Tolerances& tol,
                  std::vector<GateOp>& ops) {
  if (std::all_of(family.begin(), family.end(),
                  [&](const Matrix& m) { return near_identity(m, tol.prune); })) {
    return;
  }
  if (qudits.size() == 1) {
    std::vector<int> targets = controls;
    targets.push_back(qudits.front());
    if (controls.empty()) {
      ops.push_back({GateRef::custom(family.front(), {d}), std::move(targets)});
    } else {
      ops.push_back({GateRef::mux(family, std::vector<int>(controls.size(), d), d),
                     std::move(targets)});
    }
    return;
  }

  const int r0 = static_cast<int>(family.front().rows()) / d;
  std::vector<std::vector<CsdFactor>> factored;
  for (const Matrix& m : family) factored.push_back(csd_qudit(m, d, tol));
  const std::size_t nf = factored.front().size();

  const int lead = qudits.front();
  const std::vector<int> rest(qudits.begin() + 1, qudits.end());
  std::vector<int> sub_controls = controls;
  sub_controls.push_back(lead);

  // The factor list is a matrix product; the last factor acts first.
  for (std::size_t fi = nf; fi-- > 0;) {
    const CsdFactor& shape = factored.front()[fi];
    if (shape.kind == CsdFactor::Kind::BlockDiag) {
      std::vector<Matrix> sub;
      for (const auto& fs : factored) {
        for (const Matrix& b : fs[fi].blocks) sub.push_back(b);
      }
      lower_family(sub, sub_controls, rest, d, tol, ops);
      continue;
    }
    // Rows offset+i and offset+r0+i differ only in the lead digit (a vs a+1),
    // so each pair is a two-level rotation on the lead qudit selected by the
    // controls and the remaining digits i.
    const int level = shape.offset / r0;
    std::vector<Matrix> rotations;
    bool trivial = true;
    for (const auto& fs : factored) {
      for (int i = 0; i < r0; ++i) {
        const double theta = fs[fi].theta[i];
        if (std::abs(theta) > tol.prune) trivial = false;
        rotations.push_back(two_level_rotation(d, level, theta));
      }
    }
    if (trivial) continue;
    std::vector<int> mux_controls = controls;
    mux_controls.insert(mux_controls.end(), rest.begin(), rest.end());
    std::vector<int> targets = mux_controls;
    targets.push_back(lead);
    ops.push_back({GateRef::mux(std::move(rotations), std::vector<int>(mux_controls.size(), d), d),
                   std::move(targets)});
  }
}

}  // namespace

std::vector<CsdFactor> csd_qudit(const Matrix& u, int d, const Tolerances& tol) {
  require_dimension(d);
  if (u.rows() != u.cols()) throw ShapeMismatch("csd_qudit needs a square matrix");
  const int n = log_dim(u.rows(), d);
  if (n < 1) {
    throw InvalidDimension("matrix size " + std::to_string(u.rows()) + " is not a power of " +
                           std::to_string(d));
  }
  require_unitary(u, "csd_qudit input", tol.unitarity);
  if (n == 1) return {block_factor({u})};
  return peel(u, static_cast<int>(u.rows()) / d, 0, tol);
}

Circuit lower_to_circuit(const std::vector<CsdFactor>& factors, int d, int n,
                         const Tolerances& tol) {
  require_dimension(d);
  if (n < 1) throw InvalidArgument("lower_to_circuit needs n >= 1");
  const long long dim = int_pow(d, n);
  std::vector<int> qudits(n);
  for (int i = 0; i < n; ++i) qudits[i] = i;
  Circuit circuit(std::vector<int>(n, d));

  if (n == 1) {
    const Matrix u = reconstruct(factors, dim);
    circuit.append(GateRef::custom(u, {d}), {0});
    return circuit;
  }
  // Rebuild the top-level unitary's factor list into ops: the same walk as
  // lower_family but starting from the given factors.
  const int r0 = static_cast<int>(dim / d);
  std::vector<GateOp> ops;
  const std::vector<int> rest(qudits.begin() + 1, qudits.end());
  for (std::size_t fi = factors.size(); fi-- > 0;) {
    const CsdFactor& f = factors[fi];
    if (f.kind == CsdFactor::Kind::BlockDiag) {
      if (f.blocks.size() != static_cast<std::size_t>(d) || f.blocks.front().rows() != r0) {
        throw ShapeMismatch("block-diagonal factor is not aligned to the leading qudit");
      }
      lower_family(f.blocks, {0}, rest, d, tol, ops);
      continue;
    }
    if (f.p != r0 || f.offset % r0 != 0) {
      throw ShapeMismatch("cosine-sine factor is not aligned to the leading qudit");
    }
    std::vector<Matrix> rotations;
    bool trivial = true;
    for (int i = 0; i < r0; ++i) {
      if (std::abs(f.theta[i]) > tol.prune) trivial = false;
      rotations.push_back(two_level_rotation(d, f.offset / r0, f.theta[i]));
    }
    if (trivial) continue;
    std::vector<int> targets = rest;
    targets.push_back(0);
    ops.push_back({GateRef::mux(std::move(rotations), std::vector<int>(rest.size(), d), d),
                   std::move(targets)});
  }
  for (GateOp& op : ops) circuit.append(std::move(op));
  return circuit;
}

Circuit csd_compile(const Matrix& u, int d, const Tolerances& tol) {
  const std::vector<CsdFactor> factors = csd_qudit(u, d, tol);
  const int n = log_dim(u.rows(), d);
  return lower_to_circuit(factors, d, n, tol);
}

}  // namespace qudcomp
