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

#include "qudcomp/sk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include "json.hpp"

#include "qudcomp/errors.hpp"
#include "qudcomp/random.hpp"
#include "qudcomp/sim.hpp"

namespace qudcomp {

namespace {

bool is_inverse_pair(const Matrix& a, const Matrix& b) {
  return (a * b - Matrix::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() < 1e-12;
}

BasisLetter embed_letter(const std::string& name, const GateRef& gate,
                         const std::vector<int>& dims, std::vector<int> targets) {
  return {name, embed_dense(dims, gate.matrix(), targets), gate, std::move(targets), -1};
}

}  // namespace

// ---------------------------------------------------------------------------
// BasisSet
// ---------------------------------------------------------------------------

BasisSet::BasisSet(std::vector<int> qudit_dims, std::vector<BasisLetter> letters)
    : qudit_dims_(std::move(qudit_dims)), letters_(std::move(letters)) {
  if (letters_.empty()) throw InvalidArgument("basis set is empty");
  if (qudit_dims_.empty()) throw InvalidArgument("basis set needs at least one qudit");
  dim_ = 1;
  for (int d : qudit_dims_) {
    require_dimension(d);
    dim_ *= d;
  }
  for (BasisLetter& l : letters_) {
    if (l.matrix.rows() != dim_ || l.matrix.cols() != dim_) {
      throw ShapeMismatch("basis letter " + l.name + " does not act on dimension " +
                          std::to_string(dim_));
    }
    require_unitary(l.matrix, "basis letter", default_tolerances().unitarity);
  }
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    for (std::size_t j = 0; j < letters_.size(); ++j) {
      if (is_inverse_pair(letters_[i].matrix, letters_[j].matrix)) {
        letters_[i].inverse = static_cast<int>(j);
        break;
      }
    }
    if (letters_[i].inverse < 0) {
      throw InvalidArgument("basis letter " + letters_[i].name + " has no inverse in the set");
    }
  }
}

BasisSet BasisSet::standard(int d) {
  require_dimension(d);
  const std::vector<int> dims{d};
  std::vector<BasisLetter> letters;
  letters.push_back(embed_letter("H", GateRef::h(d), dims, {0}));
  if (d > 2) letters.push_back(embed_letter("Hdag", GateRef::hdag(d), dims, {0}));
  letters.push_back(embed_letter("T", GateRef::t(d), dims, {0}));
  letters.push_back(embed_letter("Tdag", GateRef::tdag(d), dims, {0}));
  return BasisSet(dims, std::move(letters));
}

BasisSet BasisSet::multi_qudit(int d, int n) {
  require_dimension(d);
  if (n < 1) throw InvalidArgument("basis needs n >= 1");
  const std::vector<int> dims(n, d);
  std::vector<BasisLetter> letters;
  for (int q = 0; q < n; ++q) {
    const std::string s = std::to_string(q);
    letters.push_back(embed_letter("H" + s, GateRef::h(d), dims, {q}));
    if (d > 2) letters.push_back(embed_letter("Hdag" + s, GateRef::hdag(d), dims, {q}));
    letters.push_back(embed_letter("T" + s, GateRef::t(d), dims, {q}));
    letters.push_back(embed_letter("Tdag" + s, GateRef::tdag(d), dims, {q}));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const std::string s = std::to_string(a) + std::to_string(b);
      const GateRef sum = GateRef::sum(d, d);
      letters.push_back(embed_letter("SUM" + s, sum, dims, {a, b}));
      if (d > 2) letters.push_back(embed_letter("SUMdag" + s, adjoint(sum), dims, {a, b}));
    }
  }
  return BasisSet(dims, std::move(letters));
}

std::string BasisSet::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::int64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= static_cast<std::uint64_t>((v >> (8 * i)) & 0xff);
      h *= 1099511628211ULL;
    }
  };
  for (int d : qudit_dims_) mix(d);
  for (const BasisLetter& l : letters_) {
    for (Eigen::Index k = 0; k < l.matrix.size(); ++k) {
      mix(std::llround(l.matrix(k).real() * 1e9));
      mix(std::llround(l.matrix(k).imag() * 1e9));
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// GateWord
// ---------------------------------------------------------------------------

GateWord GateWord::identity(const BasisSet& basis) {
  return {{}, Matrix::Identity(basis.dim(), basis.dim())};
}

GateWord GateWord::from_letters(const BasisSet& basis, std::vector<int> letters) {
  GateWord w = identity(basis);
  for (int l : letters) {
    if (l < 0 || l >= basis.size()) throw InvalidArgument("letter index out of range");
    w.matrix = w.matrix * basis.letter(l).matrix;
  }
  w.letters = std::move(letters);
  free_reduce(w, basis);
  return w;
}

std::vector<std::pair<std::string, int>> GateWord::letter_counts(const BasisSet& basis) const {
  std::vector<std::pair<std::string, int>> out;
  for (const BasisLetter& l : basis.letters()) out.emplace_back(l.name, 0);
  for (int l : letters) ++out.at(l).second;
  return out;
}

void free_reduce(GateWord& w, const BasisSet& basis) {
  std::vector<int> stack;
  stack.reserve(w.letters.size());
  for (int l : w.letters) {
    if (!stack.empty() && basis.inverse(stack.back()) == l) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  w.letters = std::move(stack);
}

GateWord concat(const GateWord& a, const GateWord& b, const BasisSet& basis) {
  GateWord out;
  out.letters = a.letters;
  out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
  out.matrix = a.matrix * b.matrix;
  free_reduce(out, basis);
  return out;
}

GateWord inverse(const GateWord& w, const BasisSet& basis) {
  GateWord out;
  out.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    out.letters.push_back(basis.inverse(*it));
  }
  out.matrix = w.matrix.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// ApproximationTable
// ---------------------------------------------------------------------------

ApproximationTable::ApproximationTable(BasisSet basis, int max_len,
                                       std::vector<GateWord> entries, double epsilon0)
    : basis_(std::move(basis)),
      max_len_(max_len),
      entries_(std::move(entries)),
      epsilon0_(epsilon0) {
  if (entries_.empty()) throw InvalidArgument("approximation table is empty");
  build_index();
}

namespace {

constexpr std::size_t kLinearScanLimit = 2048;
constexpr std::size_t kLeafSize = 12;
// Slack on triangle-inequality pruning so rounding never drops the true
// nearest entry.
constexpr double kPruneSlack = 1e-12;

bool better(double d, std::size_t i, double best_d, std::size_t best) {
  return d < best_d || (d == best_d && i < best);
}

}  // namespace

void ApproximationTable::build_index() {
  nodes_.clear();
  leaf_items_.clear();
  root_ = -1;
  if (entries_.size() <= kLinearScanLimit) return;
  std::vector<std::size_t> items(entries_.size());
  for (std::size_t i = 0; i < items.size(); ++i) items[i] = i;
  root_ = build_node(items, 0, items.size());
}

int ApproximationTable::build_node(std::vector<std::size_t>& items, std::size_t lo,
                                   std::size_t hi) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (hi - lo <= kLeafSize) {
    VpNode& leaf = nodes_[id];
    leaf.leaf = true;
    leaf.begin = leaf_items_.size();
    leaf_items_.insert(leaf_items_.end(), items.begin() + lo, items.begin() + hi);
    leaf.end = leaf_items_.size();
    return id;
  }
  const std::size_t vp = items[lo];
  const Matrix& vm = entries_[vp].matrix;
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(hi - lo - 1);
  for (std::size_t k = lo + 1; k < hi; ++k) scored.emplace_back(dist(vm, entries_[items[k]].matrix), items[k]);
  const std::size_t mid = scored.size() / 2;
  std::nth_element(scored.begin(), scored.begin() + mid, scored.end());
  for (std::size_t k = 0; k < scored.size(); ++k) items[lo + 1 + k] = scored[k].second;
  const double radius = scored[mid].first;
  const std::size_t split = lo + 1 + mid + 1;  // inside: [lo+1, split)
  const int inside = build_node(items, lo + 1, split);
  const int outside = build_node(items, split, hi);
  VpNode& node = nodes_[id];
  node.point = vp;
  node.radius = radius;
  node.inside = inside;
  node.outside = outside;
  return id;
}

void ApproximationTable::search(int node_id, const Matrix& u, std::size_t& best,
                                double& best_d) const {
  const VpNode& node = nodes_[node_id];
  if (node.leaf) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t i = leaf_items_[k];
      const double d = dist(u, entries_[i].matrix);
      if (better(d, i, best_d, best)) {
        best_d = d;
        best = i;
      }
    }
    return;
  }
  const double d = dist(u, entries_[node.point].matrix);
  if (better(d, node.point, best_d, best)) {
    best_d = d;
    best = node.point;
  }
  auto try_inside = [&] {
    if (d - best_d <= node.radius + kPruneSlack) search(node.inside, u, best, best_d);
  };
  auto try_outside = [&] {
    if (d + best_d >= node.radius - kPruneSlack) search(node.outside, u, best, best_d);
  };
  if (d <= node.radius) {
    try_inside();
    try_outside();
  } else {
    try_outside();
    try_inside();
  }
}

std::pair<std::size_t, double> ApproximationTable::nearest_index(const Matrix& u) const {
  if (u.rows() != dim() || u.cols() != dim()) {
    throw ShapeMismatch("nearest: query has size " + std::to_string(u.rows()) +
                        ", table dimension is " + std::to_string(dim()));
  }
  std::size_t best = entries_.size();
  double best_d = std::numeric_limits<double>::infinity();
  if (root_ < 0) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const double d = dist(u, entries_[i].matrix);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
  } else {
    search(root_, u, best, best_d);
  }
  return {best, best_d};
}

const GateWord& ApproximationTable::nearest(const Matrix& u) const {
  return entries_[nearest_index(u).first];
}

double ApproximationTable::measure_radius(const std::vector<Matrix>& targets) const {
  double worst = 0.0;
  for (const Matrix& t : targets) worst = std::max(worst, nearest_index(t).second);
  return worst;
}

// ---------------------------------------------------------------------------
// build_table
// ---------------------------------------------------------------------------

namespace {

// Phase-invariant features of a unitary, quantised into hash cells. Matrices
// within the dedup tolerance differ by far less than a cell, so a probe only
// needs the neighbouring cell along axes where the point sits near an edge.
class PhaseClassIndex {
 public:
  explicit PhaseClassIndex(double tol) : tol_(tol) {}

  /// Index of an existing entry within tolerance of `m`, or npos.
  std::size_t find(const Matrix& m, const std::vector<GateWord>& entries) const {
    const Features f = features(m);
    std::array<std::int64_t, 4> base{};
    std::array<int, 4> other{};
    for (int a = 0; a < 4; ++a) {
      const double x = f[a] / kCell;
      base[a] = static_cast<std::int64_t>(std::floor(x));
      const double frac = x - std::floor(x);
      other[a] = frac < kEdge ? -1 : (frac > 1.0 - kEdge ? 1 : 0);
    }
    for (int mask = 0; mask < 16; ++mask) {
      std::array<std::int64_t, 4> key = base;
      bool valid = true;
      for (int a = 0; a < 4; ++a) {
        if (mask & (1 << a)) {
          if (other[a] == 0) {
            valid = false;
            break;
          }
          key[a] += other[a];
        }
      }
      if (!valid) continue;
      auto it = cells_.find(key);
      if (it == cells_.end()) continue;
      for (std::size_t idx : it->second) {
        if (dist(m, entries[idx].matrix) <= tol_) return idx;
      }
    }
    return npos;
  }

  void insert(const Matrix& m, std::size_t idx) {
    const Features f = features(m);
    std::array<std::int64_t, 4> key{};
    for (int a = 0; a < 4; ++a) key[a] = static_cast<std::int64_t>(std::floor(f[a] / kCell));
    cells_[key].push_back(idx);
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  using Features = std::array<double, 4>;
  static constexpr double kCell = 1e-4;
  static constexpr double kEdge = 0.05;

  static Features features(const Matrix& m) {
    const Complex c = m(0, 0) * std::conj(m(1, 1));
    return {std::norm(m(0, 0)), std::norm(m(1, 0)), c.real(), c.imag()};
  }

  struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 4>& k) const {
      std::size_t h = 0;
      for (std::int64_t v : k) h = h * 1000003u ^ std::hash<std::int64_t>()(v);
      return h;
    }
  };

  double tol_;
  std::unordered_map<std::array<std::int64_t, 4>, std::vector<std::size_t>, KeyHash> cells_;
};

}  // namespace

ApproximationTable build_table(const BasisSet& basis, int max_len, const TableOptions& opts,
                               const Tolerances& tol) {
  if (basis.size() == 0) throw InvalidArgument("basis set is empty");
  if (max_len < 1) throw InvalidArgument("max_len must be at least 1");
  std::vector<GateWord> entries;
  PhaseClassIndex index(tol.dedup);
  entries.push_back(GateWord::identity(basis));
  index.insert(entries.back().matrix, 0);

  std::vector<std::size_t> frontier{0};
  for (int len = 1; len <= max_len && !frontier.empty(); ++len) {
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      for (int l = 0; l < basis.size(); ++l) {
        const GateWord& w = entries[idx];
        if (!w.letters.empty() && basis.inverse(w.letters.back()) == l) continue;
        Matrix m = w.matrix * basis.letter(l).matrix;
        if (index.find(m, entries) != PhaseClassIndex::npos) continue;
        if (entries.size() >= opts.max_entries) {
          throw SizeGuard("approximation table exceeds " + std::to_string(opts.max_entries) +
                          " entries at word length " + std::to_string(len));
        }
        GateWord fresh;
        fresh.letters = w.letters;
        fresh.letters.push_back(l);
        fresh.matrix = std::move(m);
        index.insert(fresh.matrix, entries.size());
        next.push_back(entries.size());
        entries.push_back(std::move(fresh));
      }
    }
    frontier = std::move(next);
  }

  ApproximationTable table(basis, max_len, std::move(entries), 0.0);
  Rng rng(opts.epsilon_seed);
  std::vector<Matrix> targets;
  targets.reserve(opts.epsilon_samples);
  for (int i = 0; i < opts.epsilon_samples; ++i) targets.push_back(random_unitary(basis.dim(), rng));
  const double eps0 = table.measure_radius(targets);
  return ApproximationTable(basis, max_len, std::vector<GateWord>(table.entries()), eps0);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {
constexpr int kTableFormat = 1;
}  // namespace

void save_table(const ApproximationTable& table, const std::string& path) {
  nlohmann::json j;
  j["format"] = kTableFormat;
  j["dims"] = table.basis().qudit_dims();
  j["basis"] = table.basis().fingerprint();
  std::vector<std::string> names;
  for (const BasisLetter& l : table.basis().letters()) names.push_back(l.name);
  j["letters"] = names;
  j["max_len"] = table.max_word_length();
  j["epsilon0"] = table.achieved_epsilon0();
  nlohmann::json entries = nlohmann::json::array();
  for (const GateWord& w : table.entries()) entries.push_back(w.letters);
  j["entries"] = std::move(entries);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write table file " + path);
  out << j.dump();
  if (!out) throw InvalidArgument("failed writing table file " + path);
}

ApproximationTable load_table(const std::string& path, const BasisSet& basis) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("table file " + path + ": " + e.what());
  }
  try {
    if (j.at("format").get<int>() != kTableFormat) {
      throw ParseError("table file " + path + " has an unsupported format version");
    }
    if (j.at("basis").get<std::string>() != basis.fingerprint() ||
        j.at("dims").get<std::vector<int>>() != basis.qudit_dims()) {
      throw ParseError("table file " + path + " was built for a different basis");
    }
    std::vector<GateWord> entries;
    for (const auto& e : j.at("entries")) {
      entries.push_back(GateWord::from_letters(basis, e.get<std::vector<int>>()));
    }
    return ApproximationTable(basis, j.at("max_len").get<int>(), std::move(entries),
                              j.at("epsilon0").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("table file " + path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError("table file " + path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Group commutator
// ---------------------------------------------------------------------------

namespace {

Matrix group_commutator(const Matrix& v, const Matrix& w) {
  return v * w * v.adjoint() * w.adjoint();
}

std::vector<double> hermitian_residual(const Matrix& r) {
  return coeffs_from_hermitian((r - r.adjoint()) / Complex(0.0, 2.0));
}

struct Generators {
  std::vector<double> b;
  std::vector<double> c;
};

Matrix commutator_of(const Generators& g, int d) {
  return group_commutator(exp_i_hermitian(generator_from_coeffs(g.b, d)),
                          exp_i_hermitian(generator_from_coeffs(g.c, d)));
}

// Newton iteration on the generator coefficients with a central-difference
// Jacobian; the system is underdetermined so each step is minimum-norm.
double refine(Generators& g, const Matrix& target, int d) {
  const int m = d * d - 1;
  const Matrix target_adj = target.adjoint();
  auto residual = [&](const Generators& x) {
    return hermitian_residual(commutator_of(x, d) * target_adj);
  };
  auto error = [&](const Generators& x) {
    return (commutator_of(x, d) - target).cwiseAbs().maxCoeff();
  };
  double err = error(g);
  constexpr double kStep = 1e-6;
  for (int iter = 0; iter < 30 && err > 1e-14; ++iter) {
    const std::vector<double> r0 = residual(g);
    Eigen::MatrixXd jac(m, 2 * m);
    for (int k = 0; k < 2 * m; ++k) {
      Generators plus = g, minus = g;
      double& p = k < m ? plus.b[k] : plus.c[k - m];
      double& q = k < m ? minus.b[k] : minus.c[k - m];
      p += kStep;
      q -= kStep;
      const std::vector<double> rp = residual(plus);
      const std::vector<double> rm = residual(minus);
      for (int i = 0; i < m; ++i) jac(i, k) = (rp[i] - rm[i]) / (2.0 * kStep);
    }
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = -r0[i];
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(rhs);
    Generators trial = g;
    for (int k = 0; k < m; ++k) {
      trial.b[k] += step(k);
      trial.c[k] += step(m + k);
    }
    const double trial_err = error(trial);
    if (!(trial_err < err)) break;
    g = std::move(trial);
    err = trial_err;
  }
  return err;
}

}  // namespace

namespace {

// Balanced decomposition with W's generator scaled by 1/skew and V's by skew.
CommutatorPair decompose(const Matrix& delta, const Tolerances& tol, double skew) {
  if (delta.rows() != delta.cols()) throw ShapeMismatch("approx_decompose needs a square matrix");
  const int d = static_cast<int>(delta.rows());
  require_dimension(d);
  require_unitary(delta, "approx_decompose input", tol.unitarity);
  const double eps = dist_to_identity(delta);
  if (!(eps < tol.balance_threshold)) {
    throw ConvergenceFailure("residual distance " + format_real(eps) +
                                 " is not below the balance threshold " +
                                 format_real(tol.balance_threshold) +
                                 "; the base table is too coarse",
                             {eps});
  }

  // Scale to determinant one, picking the root of unity that lands nearest I.
  const Complex det = delta.determinant();
  Complex phase(1.0, 0.0);
  double best = -1.0;
  for (int k = 0; k < d; ++k) {
    const Complex p = std::polar(1.0, -(std::arg(det) + 2.0 * std::numbers::pi * k) / d);
    const double score = (p * delta.trace()).real();
    if (score > best) {
      best = score;
      phase = p;
    }
  }
  const Matrix target = phase * delta;

  CommutatorPair out;
  out.phase = phase;
  const Matrix eye = Matrix::Identity(d, d);
  if ((target - eye).cwiseAbs().maxCoeff() < 1e-15) {
    out.v = eye;
    out.w = eye;
    return out;
  }

  // target = Q e^{iΦ} Q† with Σφ = 0.
  Eigen::ComplexSchur<Matrix> schur(target);
  const Matrix q = schur.matrixU();
  std::vector<double> phi(d);
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    phi[j] = std::arg(schur.matrixT()(j, j));
    total += phi[j];
  }
  const long long wraps = std::llround(total / (2.0 * std::numbers::pi));
  for (long long w = 0; w < std::llabs(wraps); ++w) {
    auto it = wraps > 0 ? std::max_element(phi.begin(), phi.end())
                        : std::min_element(phi.begin(), phi.end());
    *it += wraps > 0 ? -2.0 * std::numbers::pi : 2.0 * std::numbers::pi;
  }

  // We need Hermitian B, C with −[B, C] = iA at first order. Rotating the
  // diagonal Λ by the Fourier matrix clears its diagonal, so C' = diag(c)
  // and B'_jk = M_jk / (c_k − c_j) with M = −iFΛF† solve [B', C'] = M.
  const Matrix f = hadamard(d);
  Matrix lambda = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) lambda(j, j) = phi[j];
  const Matrix mm = Complex(0.0, -1.0) * (f * lambda * f.adjoint());
  Matrix bp = Matrix::Zero(d, d);
  Matrix cp = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) cp(j, j) = j - 0.5 * (d - 1);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      if (j != k) bp(j, k) = mm(j, k) / (cp(k, k) - cp(j, j));
    }
  }
  const Matrix basis_change = q * f.adjoint();
  Matrix b = basis_change * bp * basis_change.adjoint();
  Matrix c = basis_change * cp * basis_change.adjoint();
  const double nb = b.norm();
  const double nc = c.norm();
  if (nb > 0.0 && nc > 0.0) {
    const double s = std::sqrt(nc / nb);
    b *= s * skew;
    c /= s * skew;
  }

  Generators g{coeffs_from_hermitian(b), coeffs_from_hermitian(c)};
  out.residual = refine(g, target, d);
  if (!(out.residual <= 1e-10)) {
    throw ConvergenceFailure("group commutator refinement stalled at residual " +
                                 format_real(out.residual),
                             {eps});
  }
  out.v = exp_i_hermitian(generator_from_coeffs(g.b, d));
  out.w = exp_i_hermitian(generator_from_coeffs(g.c, d));
  out.residual = (group_commutator(out.v, out.w) - target).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

CommutatorPair approx_decompose(const Matrix& delta, const Tolerances& tol) {
  return decompose(delta, tol, 1.0);
}

// ---------------------------------------------------------------------------
// Solovay-Kitaev recursion
// ---------------------------------------------------------------------------

namespace {

struct SkState {
  const ApproximationTable& table;
  const Tolerances& tol;
  std::size_t nearest_calls = 0;
};

// Conjugating V and W by S = e^{itA}, which commutes with the residual
// e^{iA}, leaves the commutator unchanged. The rotations give equally valid
// decompositions whose table approximations differ in quality.
std::vector<std::pair<Matrix, Matrix>> rotated_pairs(const Matrix& target,
                                                     const CommutatorPair& vw) {
  constexpr int kCandidates = 8;
  std::vector<std::pair<Matrix, Matrix>> out{{vw.v, vw.w}};
  const Matrix a = log_unitary(target);
  const double spread = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (a + a.adjoint()))
                            .eigenvalues()
                            .cwiseAbs()
                            .maxCoeff();
  if (!(spread > 1e-12)) return out;
  for (int j = 1; j < kCandidates; ++j) {
    const double t = std::numbers::pi * j / (kCandidates * spread);
    const Matrix s = exp_i_hermitian(a, t);
    out.emplace_back(s * vw.v * s.adjoint(), s * vw.w * s.adjoint());
  }
  return out;
}

GateWord approximate(SkState& st, const Matrix& u, int depth, double target,
                     std::vector<double>* trace) {
  const BasisSet& basis = st.table.basis();
  ++st.nearest_calls;
  const auto [idx, d0] = st.table.nearest_index(u);
  GateWord current = st.table.entries()[idx];
  double err = d0;
  if (trace) trace->push_back(err);
  for (int k = 1; k <= depth; ++k) {
    if (err == 0.0 || err <= target) break;
    const Matrix residual = u * current.matrix.adjoint();
    CommutatorPair vw;
    try {
      vw = approx_decompose(residual, st.tol);
    } catch (const ConvergenceFailure& e) {
      if (!trace) throw;
      throw ConvergenceFailure(std::string("Solovay-Kitaev level ") + std::to_string(k) +
                                   ": " + e.what(),
                               *trace);
    }
    const Matrix goal = vw.phase * residual;
    const auto pairs = rotated_pairs(goal, vw);

    auto refine_with = [&](const std::pair<Matrix, Matrix>& p) {
      const GateWord v = approximate(st, p.first, k - 1, 0.0, nullptr);
      const GateWord w = approximate(st, p.second, k - 1, 0.0, nullptr);
      GateWord next = concat(concat(v, w, basis),
                             concat(inverse(v, basis), inverse(w, basis), basis), basis);
      return concat(next, current, basis);
    };

    // Rank rotations by their base-table approximations and refine the best.
    const std::vector<GateWord>& entries = st.table.entries();
    auto proxy_best = [&](const std::vector<std::pair<Matrix, Matrix>>& family) {
      std::size_t best = 0;
      double best_score = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < family.size(); ++j) {
        st.nearest_calls += 2;
        const Matrix& va = entries[st.table.nearest_index(family[j].first).first].matrix;
        const Matrix& wa = entries[st.table.nearest_index(family[j].second).first].matrix;
        const double score = dist(group_commutator(va, wa), goal);
        if (score < best_score) {
          best_score = score;
          best = j;
        }
      }
      return best;
    };
    const std::size_t chosen = proxy_best(pairs);
    GateWord next = refine_with(pairs[chosen]);
    double next_err = dist(u, next.matrix);
    if (next_err > err) {
      // A step that would lose accuracy is retried with every rotation, then
      // with skewed balances.
      for (double skew : {1.0, 0.75, 1.0 / 0.75, 0.5, 2.0}) {
        std::vector<std::pair<Matrix, Matrix>> family = pairs;
        if (skew != 1.0) family = rotated_pairs(goal, decompose(residual, st.tol, skew));
        for (std::size_t j = 0; j < family.size(); ++j) {
          if (skew == 1.0 && j == chosen) continue;
          GateWord candidate = refine_with(family[j]);
          const double e = dist(u, candidate.matrix);
          if (e < next_err) {
            next_err = e;
            next = std::move(candidate);
          }
        }
        if (next_err <= err) break;
      }
    }
    if (trace) {
      trace->push_back(next_err);
      // Rebuilding an unchanged word from identity factors may move the
      // distance by rounding only.
      if (next_err > err + 1e-12) {
        throw ConvergenceFailure("Solovay-Kitaev error grew at level " + std::to_string(k) +
                                     " (table epsilon0 " +
                                     format_real(st.table.achieved_epsilon0()) + ")",
                                 *trace);
      }
    } else if (next_err > err) {
      // Inner approximations keep the better word; only the top-level trace
      // reports failure.
      continue;
    }
    current = std::move(next);
    err = next_err;
  }
  return current;
}

}  // namespace

SkResult solovay_kitaev(const ApproximationTable& table, const Matrix& u, int depth,
                        double target, const Tolerances& tol) {
  if (depth < 0) throw InvalidArgument("Solovay-Kitaev depth must be non-negative");
  if (u.rows() != table.dim() || u.cols() != table.dim()) {
    throw ShapeMismatch("Solovay-Kitaev target has size " + std::to_string(u.rows()) +
                        ", table dimension is " + std::to_string(table.dim()));
  }
  require_unitary(u, "Solovay-Kitaev target", tol.unitarity);
  SkState st{table, tol};
  SkResult out;
  out.word = approximate(st, u, depth, target, &out.trace);
  out.distance = out.trace.back();
  out.nearest_calls = st.nearest_calls;
  return out;
}

}  // namespace qudcomp
