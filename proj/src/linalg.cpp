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

#include "qudcomp/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qudcomp/errors.hpp"

namespace qudcomp {

namespace {

constexpr double kPi = std::numbers::pi;

int pair_count(int d) { return d * (d - 1) / 2; }

// Unitary Schur form of a normal matrix: Q and the eigenvalues on T's diagonal.
struct NormalEigen {
  Matrix q;
  Vector values;
};

NormalEigen normal_eigen(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) {
    throw NumericalFailure("Schur decomposition did not converge");
  }
  return {schur.matrixU(), schur.matrixT().diagonal()};
}

}  // namespace

void require_dimension(int d) {
  if (d < 2) {
    throw InvalidDimension("qudit dimension must be >= 2, got " +
                           std::to_string(d));
  }
}

double unitarity_error(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const Matrix e = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return e.cwiseAbs().maxCoeff();
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  if (!u.allFinite()) return false;
  return unitarity_error(u) <= tol;
}

void require_unitary(const Matrix& u, const char* what, double tol) {
  if (u.rows() != u.cols()) {
    throw ShapeMismatch(std::string(what) + ": matrix is not square");
  }
  if (!is_unitary(u, tol)) {
    throw NotUnitary(std::string(what) + ": matrix is not unitary (error " +
                     format_real(unitarity_error(u)) + ")");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix matrix_power(const Matrix& u, long long p) {
  Matrix base = p < 0 ? Matrix(u.adjoint()) : u;
  unsigned long long e = p < 0 ? static_cast<unsigned long long>(-p)
                               : static_cast<unsigned long long>(p);
  Matrix result = Matrix::Identity(u.rows(), u.cols());
  while (e > 0) {
    if (e & 1ULL) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

long long int_pow(long long d, int n) {
  long long r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > std::numeric_limits<long long>::max() / d) {
      throw SizeGuard("integer power overflow");
    }
    r *= d;
  }
  return r;
}

int log_dim(long long size, int d) {
  if (d < 2 || size < 1) return -1;
  int n = 0;
  long long acc = 1;
  while (acc < size) {
    acc *= d;
    ++n;
  }
  return acc == size ? n : -1;
}

std::vector<Matrix> gellmann_basis(int d) {
  require_dimension(d);
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d - 1));
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      basis.push_back(std::move(m));
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = Complex(0, -1);
      m(k, j) = Complex(0, 1);
      basis.push_back(std::move(m));
    }
  }
  for (int l = 1; l < d; ++l) {
    Matrix m = Matrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) m(j, j) = scale;
    m(l, l) = -l * scale;
    basis.push_back(std::move(m));
  }
  return basis;
}

Matrix generator_from_coeffs(std::span<const double> coeffs, int d) {
  require_dimension(d);
  if (coeffs.size() != static_cast<std::size_t>(d * d - 1)) {
    throw ShapeMismatch("su(" + std::to_string(d) + ") coefficient vector needs " +
                        std::to_string(d * d - 1) + " entries, got " +
                        std::to_string(coeffs.size()));
  }
  const int pairs = pair_count(d);
  Matrix h = Matrix::Zero(d, d);
  int p = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k, ++p) {
      const Complex v(coeffs[p], -coeffs[pairs + p]);
      h(j, k) += v;
      h(k, j) += std::conj(v);
    }
  }
  for (int l = 1; l < d; ++l) {
    const double c = coeffs[2 * pairs + l - 1] * std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) h(j, j) += c;
    h(l, l) -= l * c;
  }
  return h;
}

std::vector<double> coeffs_from_hermitian(const Matrix& h) {
  const int d = static_cast<int>(h.rows());
  require_dimension(d);
  const int pairs = pair_count(d);
  std::vector<double> c(static_cast<std::size_t>(d * d - 1));
  int p = 0;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k, ++p) {
      const Complex hjk = 0.5 * (h(j, k) + std::conj(h(k, j)));
      c[p] = hjk.real();
      c[pairs + p] = -hjk.imag();
    }
  }
  for (int l = 1; l < d; ++l) {
    double acc = 0.0;
    for (int j = 0; j < l; ++j) acc += h(j, j).real();
    acc -= l * h(l, l).real();
    c[2 * pairs + l - 1] = 0.5 * std::sqrt(2.0 / (l * (l + 1.0))) * acc;
  }
  return c;
}

StructureTensors structure_constants(int d) {
  const std::vector<Matrix> basis = gellmann_basis(d);
  const int n = static_cast<int>(basis.size());
  StructureTensors t;
  t.d = d;
  t.size = n;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  t.f.assign(total, 0.0);
  t.dsym.assign(total, 0.0);

  // tr(A B) without forming the product.
  auto trace_product = [](const Matrix& a, const Matrix& b) {
    return (a.transpose().array() * b.array()).sum();
  };
  std::vector<Matrix> products(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) products[a * n + b] = basis[a] * basis[b];
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Matrix& ab = products[a * n + b];
      const Matrix& ba = products[b * n + a];
      for (int c = 0; c < n; ++c) {
        const Complex tab = trace_product(ab, basis[c]);
        const Complex tba = trace_product(ba, basis[c]);
        // tr([Λa,Λb]Λc) = 4i f_abc, tr({Λa,Λb}Λc) = 4 d_abc
        t.f[t.index(a, b, c)] = ((tab - tba) / Complex(0, 4)).real();
        t.dsym[t.index(a, b, c)] = ((tab + tba) / 4.0).real();
      }
    }
  }
  return t;
}

namespace {

std::vector<double> contract(std::span<const double> a,
                             std::span<const double> b,
                             const StructureTensors& t,
                             const std::vector<double>& tensor) {
  if (a.size() != static_cast<std::size_t>(t.size) || b.size() != a.size()) {
    throw ShapeMismatch("coefficient vectors must have length " +
                        std::to_string(t.size));
  }
  std::vector<double> out(a.size(), 0.0);
  for (int j = 0; j < t.size; ++j) {
    double acc = 0.0;
    for (int k = 0; k < t.size; ++k) {
      if (a[k] == 0.0) continue;
      for (int l = 0; l < t.size; ++l) acc += tensor[t.index(j, k, l)] * a[k] * b[l];
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> cross(std::span<const double> a, std::span<const double> b,
                          const StructureTensors& t) {
  return contract(a, b, t, t.f);
}

std::vector<double> dot_sym(std::span<const double> a,
                            std::span<const double> b,
                            const StructureTensors& t) {
  return contract(a, b, t, t.dsym);
}

SuCoordinates su_log(const Matrix& u, const Tolerances& tol) {
  require_unitary(u, "su_log", tol.unitarity);
  const int d = static_cast<int>(u.rows());
  require_dimension(d);

  double gamma = std::arg(u.determinant()) / d;
  const NormalEigen eig = normal_eigen(u * std::polar(1.0, -gamma));
  Eigen::VectorXd phases(d);
  double total = 0.0;
  for (int k = 0; k < d; ++k) {
    phases[k] = std::arg(eig.values[k]);
    if (kPi - std::abs(phases[k]) < tol.branch) {
      throw BranchCut("su_log: eigenphase on the branch cut at ±π");
    }
    total += phases[k];
  }
  // The principal log has trace 2πk; move that part into the phase.
  const double wraps = std::round(total / (2 * kPi));
  if (wraps != 0.0) {
    const double shift = 2 * kPi * wraps / d;
    gamma += shift;
    phases.array() -= shift;
  }
  // exp(−iL) = Q diag(e^{iφ}) Q†  ⇒  L = −Q diag(φ) Q†
  const Matrix l = -eig.q * phases.cast<Complex>().asDiagonal() * eig.q.adjoint();
  return {gamma, coeffs_from_hermitian(l)};
}

Matrix su_exp(const SuCoordinates& c, int d) {
  const Matrix h = generator_from_coeffs(c.coeffs, d);
  return exp_i_hermitian(h, -1.0) * std::polar(1.0, c.phase);
}

Matrix exp_i_hermitian(const Matrix& h, double t) {
  const Matrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalFailure("Hermitian eigensolver did not converge");
  }
  Vector phases(sym.rows());
  for (Eigen::Index k = 0; k < sym.rows(); ++k) {
    phases[k] = std::polar(1.0, t * eig.eigenvalues()[k]);
  }
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

Matrix log_unitary(const Matrix& u) {
  const NormalEigen eig = normal_eigen(u);
  Vector phases(u.rows());
  for (Eigen::Index k = 0; k < u.rows(); ++k) phases[k] = std::arg(eig.values[k]);
  return eig.q * phases.asDiagonal() * eig.q.adjoint();
}

double dist(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw ShapeMismatch("dist: operands have different shapes");
  }
  // For unitaries 1 − |tr(U†V)|/D equals ‖pU − V‖²/(2D) with p the phase of
  // the overlap. The difference form keeps full precision near zero, where
  // the trace form cancels down to about 1e-8.
  const Complex overlap = (u.conjugate().array() * v.array()).sum();
  const double mag = std::abs(overlap);
  if (mag == 0.0) return 1.0;
  const double sq = (u * (overlap / mag) - v).squaredNorm();
  return std::min(1.0, std::sqrt(sq / (2.0 * static_cast<double>(u.rows()))));
}

double dist_to_identity(const Matrix& u) {
  return dist(u, Matrix::Identity(u.rows(), u.cols()));
}

Complex relative_phase(const Matrix& u, const Matrix& v) {
  const Complex overlap = (u.conjugate().array() * v.array()).sum();
  const double mag = std::abs(overlap);
  return mag > 0 ? overlap / mag : Complex(1.0, 0.0);
}

Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace qudcomp
