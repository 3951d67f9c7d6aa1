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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qudcomp/tolerances.hpp"

namespace qudcomp {

using Complex = std::complex<double>;
/// Dense square complex matrix, the carrier for gates and unitaries.
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Basic helpers
// ---------------------------------------------------------------------------

/// Throws InvalidDimension unless d >= 2.
void require_dimension(int d);

/// Throws ShapeMismatch for non-square matrices and NotUnitary when
/// ‖U†U − I‖_max exceeds `tol`.
void require_unitary(const Matrix& u, const char* what, double tol);

bool is_unitary(const Matrix& u, double tol = default_tolerances().unitarity);

/// Largest |entry| of U†U − I.
double unitarity_error(const Matrix& u);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix direct_sum(const Matrix& a, const Matrix& b);

/// U^p for p >= 0, (U†)^|p| for p < 0. U must be unitary when p < 0.
Matrix matrix_power(const Matrix& u, long long p);

/// Smallest n with d^n == size, or -1 when size is not a power of d.
int log_dim(long long size, int d);

/// d^n with overflow check.
long long int_pow(long long d, int n);

// ---------------------------------------------------------------------------
// su(d) machinery
// ---------------------------------------------------------------------------

/// Generalized Gell-Mann matrices for su(d), normalised so that
/// tr(Λ_a Λ_b) = 2δ_ab.
///
/// Ordering (fixed): for pairs j < k in lexicographic order, first all the
/// symmetric matrices E_jk + E_kj, then all antisymmetric ones
/// −i E_jk + i E_kj, then the d − 1 diagonal matrices
/// sqrt(2 / (l (l + 1))) (Σ_{j<l} E_jj − l E_ll) for l = 1..d−1.
/// For d = 2 this is (σ_x, σ_y, σ_z).
std::vector<Matrix> gellmann_basis(int d);

/// Σ_j c_j Λ_j without materialising the basis.
Matrix generator_from_coeffs(std::span<const double> coeffs, int d);

/// Coefficients tr(H Λ_j) / 2 of a Hermitian matrix (the traceless part).
std::vector<double> coeffs_from_hermitian(const Matrix& h);

/// Antisymmetric structure constants f and symmetric coefficients d of the
/// Gell-Mann basis:
///   [Λ_k, Λ_l] = 2i Σ_m f_klm Λ_m,
///   {Λ_k, Λ_l} = (4/d) δ_kl I + 2 Σ_m d_klm Λ_m.
struct StructureTensors {
  int d = 0;
  int size = 0;  // d² − 1
  std::vector<double> f;
  std::vector<double> dsym;

  double f_at(int j, int k, int l) const { return f[index(j, k, l)]; }
  double d_at(int j, int k, int l) const { return dsym[index(j, k, l)]; }
  std::size_t index(int j, int k, int l) const {
    return (static_cast<std::size_t>(j) * size + k) * size + l;
  }
};

StructureTensors structure_constants(int d);

/// (A ⊗ B)_j = f_jkl A_k B_l.
std::vector<double> cross(std::span<const double> a, std::span<const double> b,
                          const StructureTensors& t);

/// (A ⊙ B)_j = d_jkl A_k B_l.
std::vector<double> dot_sym(std::span<const double> a,
                            std::span<const double> b,
                            const StructureTensors& t);

/// U = e^{iγ} exp(−i Σ_j L_j Λ_j).
struct SuCoordinates {
  double phase = 0.0;
  std::vector<double> coeffs;
};

/// Inverse of su_exp. The phase is γ = arg(det U) / d, shifted by a multiple
/// of 2π/d when the principal logarithm of e^{−iγ}U is not traceless, so that
/// the generator always lies in su(d). Eigenphases are taken in (−π, π]; one
/// within `tol.branch` of ±π raises BranchCut.
SuCoordinates su_log(const Matrix& u,
                     const Tolerances& tol = default_tolerances());

Matrix su_exp(const SuCoordinates& c, int d);

/// exp(i t H) for Hermitian H.
Matrix exp_i_hermitian(const Matrix& h, double t = 1.0);

/// Hermitian H with exp(iH) = U and spectrum in (−π, π] (principal log).
Matrix log_unitary(const Matrix& u);

/// Phase-invariant distance sqrt(max(0, 1 − |tr(U†V)| / d)). A metric on
/// U(d) modulo global phase.
double dist(const Matrix& u, const Matrix& v);

/// Distance to the identity, same metric.
double dist_to_identity(const Matrix& u);

/// Phase e^{iφ} maximising Re tr(e^{-iφ} U† V), i.e. V ≈ e^{iφ} U.
Complex relative_phase(const Matrix& u, const Matrix& v);

/// Nearest unitary in Frobenius norm (unitary polar factor).
Matrix polar_unitary(const Matrix& m);

}  // namespace qudcomp
