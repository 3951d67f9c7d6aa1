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

#include "qudcomp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "qudcomp/csd.hpp"
#include "qudcomp/errors.hpp"
#include "qudcomp/linalg.hpp"
#include "qudcomp/sim.hpp"

namespace qudcomp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::mutex g_table_mutex;
std::map<std::tuple<int, int, int>, std::shared_ptr<const ApproximationTable>> g_tables;

std::shared_ptr<const ApproximationTable> cached_table(int d, int n, int max_len) {
  std::lock_guard<std::mutex> lock(g_table_mutex);
  auto key = std::make_tuple(d, n, max_len);
  auto it = g_tables.find(key);
  if (it != g_tables.end()) return it->second;
  BasisSet basis = n == 1 ? BasisSet::standard(d) : BasisSet::multi_qudit(d, n);
  auto table = std::make_shared<const ApproximationTable>(build_table(basis, max_len));
  g_tables.emplace(key, table);
  return table;
}

// Words already synthesised for a target, keyed by the target up to phase.
class WordCache {
 public:
  explicit WordCache(bool enabled) : enabled_(enabled) {}

  const WordApproximation* find(const Matrix& u, double tol) {
    if (!enabled_) return nullptr;
    for (const auto& [key, value] : entries_) {
      if (key.rows() == u.rows() && dist(key, u) <= tol) {
        ++hits_;
        return &value;
      }
    }
    return nullptr;
  }

  const WordApproximation& insert(const Matrix& u, WordApproximation w) {
    ++misses_;
    entries_.emplace_back(u, std::move(w));
    return entries_.back().second;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  bool enabled_;
  std::vector<std::pair<Matrix, WordApproximation>> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

std::vector<GateKind> application_order(const GateWord& word, const BasisSet& basis) {
  std::vector<GateKind> out;
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    out.push_back(basis.letter(*it).gate.kind);
  }
  return out;
}

struct HybridContext {
  const ApproximationTable& table;
  const CompileOptions& opts;
  const Tolerances& tol;
  double word_tol;
  WordCache cache;
  std::size_t sk_runs = 0;
  Circuit out;
  int d;

  const WordApproximation& word_for(const Matrix& u) {
    if (const WordApproximation* hit = cache.find(u, tol.dedup)) return *hit;
    WordApproximation w =
        approximate_word(table, u, word_tol, opts.sk_depth, opts.translations, tol);
    sk_runs += static_cast<std::size_t>(w.attempts);
    return cache.insert(u, std::move(w));
  }

  // Emits Σ_c |c⟩⟨c| ⊗ branches[c] with `controls` selecting the branch
  // (first control most significant) and `target` the acted-on qudit. Each
  // branch is matched up to a phase; the phases form a diagonal on the
  // controls, which is emitted the same way one control at a time.
  void emit(const std::vector<Matrix>& branches, const std::vector<int>& controls, int target) {
    std::vector<GateWord> words;
    std::vector<Complex> phases;
    words.reserve(branches.size());
    for (const Matrix& b : branches) {
      const WordApproximation& w = word_for(b);
      words.push_back(w.word);
      phases.push_back(relative_phase(w.word.matrix, b));
    }

    const bool uniform = std::all_of(words.begin(), words.end(), [&](const GateWord& w) {
      return w.letters == words.front().letters;
    });
    if (uniform) {
      append_word(out, words.front(), table.basis(), {target});
    } else {
      std::vector<Matrix> blocks;
      std::vector<std::vector<GateKind>> spelled;
      for (const GateWord& w : words) {
        blocks.push_back(w.matrix);
        spelled.push_back(application_order(w, table.basis()));
      }
      GateRef g = GateRef::mux(std::move(blocks), std::vector<int>(controls.size(), d), d);
      g.branch_words = std::move(spelled);
      std::vector<int> targets = controls;
      targets.push_back(target);
      out.append(std::move(g), std::move(targets));
    }

    if (controls.empty()) return;
    const bool flat = std::all_of(phases.begin(), phases.end(), [&](const Complex& p) {
      return std::abs(p - phases.front()) <= tol.prune;
    });
    if (flat) return;
    const int last = controls.back();
    const std::vector<int> rest(controls.begin(), controls.end() - 1);
    std::vector<Matrix> diagonals;
    for (std::size_t base = 0; base < phases.size(); base += static_cast<std::size_t>(d)) {
      Matrix diag = Matrix::Zero(d, d);
      for (int j = 0; j < d; ++j) diag(j, j) = phases[base + static_cast<std::size_t>(j)];
      diagonals.push_back(std::move(diag));
    }
    emit(diagonals, rest, last);
  }
};

// Number of word substitutions a lowered op contributes: its branches plus
// one phase diagonal per control level.
int stage_count(const GateOp& op) {
  if (op.gate.kind == GateKind::Multiplexer) return static_cast<int>(op.targets.size());
  return 1;
}

double verified_distance(const Circuit& c, const Matrix& u) {
  if (c.total_dim() > kContractGuard) return -1.0;
  return dist(contract_to_unitary(c), u);
}

std::pair<Circuit, CompileReport> compile_csd(const Matrix& u, int d, int n,
                                              const Tolerances& tol, CompileReport report) {
  const auto start = Clock::now();
  const std::vector<CsdFactor> factors = csd_qudit(u, d, tol);
  Circuit circuit = lower_to_circuit(factors, d, n, tol);
  report.csd_ms = ms_since(start);
  report.total_ms = report.csd_ms;
  report.csd_factors = factors.size();
  report.csd_ops = circuit.ops().size();
  report.gates = count_gates(circuit);
  report.distance = verified_distance(circuit, u);
  if (report.distance > tol.lower) {
    throw SynthesisFailure("CSD circuit is " + format_real(report.distance) +
                           " from the input, above the lowering tolerance");
  }
  return {std::move(circuit), report};
}

std::pair<Circuit, CompileReport> compile_sk(const Matrix& u, int d, int n,
                                             const CompileOptions& opts, const Tolerances& tol,
                                             CompileReport report) {
  std::shared_ptr<const ApproximationTable> table =
      n == 1 ? (opts.table ? opts.table : standard_table(d))
             : (opts.multi_table ? opts.multi_table : multi_qudit_table(d, n));
  if (table->dim() != u.rows()) {
    throw ShapeMismatch("SK table acts on dimension " + std::to_string(table->dim()) +
                        ", input has " + std::to_string(u.rows()));
  }
  const auto start = Clock::now();
  report.word_tolerance = opts.epsilon;
  WordApproximation w =
      approximate_word(*table, u, opts.epsilon, opts.sk_depth, opts.translations, tol);
  Circuit circuit(std::vector<int>(n, d));
  std::vector<int> qudits(n);
  std::iota(qudits.begin(), qudits.end(), 0);
  append_word(circuit, w.word, table->basis(), qudits);
  report.sk_ms = ms_since(start);
  report.total_ms = report.sk_ms;
  report.sk_runs = static_cast<std::size_t>(w.attempts);
  report.gates = count_gates(circuit);
  report.distance = verified_distance(circuit, u);
  if (report.distance > opts.epsilon) {
    throw SynthesisFailure("SK circuit is " + format_real(report.distance) +
                           " from the input, above epsilon " + format_real(opts.epsilon));
  }
  return {std::move(circuit), report};
}

std::pair<Circuit, CompileReport> compile_hybrid(const Matrix& u, int d, int n,
                                                 const CompileOptions& opts,
                                                 const Tolerances& tol, CompileReport report) {
  std::shared_ptr<const ApproximationTable> table = opts.table ? opts.table : standard_table(d);
  if (table->dim() != d) {
    throw ShapeMismatch("hybrid compilation needs a single-qudit table of dimension " +
                        std::to_string(d));
  }
  const auto start = Clock::now();
  const std::vector<CsdFactor> factors = csd_qudit(u, d, tol);
  const Circuit lowered = lower_to_circuit(factors, d, n, tol);
  report.csd_ms = ms_since(start);
  report.csd_factors = factors.size();
  report.csd_ops = lowered.ops().size();

  const auto sk_start = Clock::now();
  int stages = 0;
  for (const Operation& op : lowered.ops()) stages += stage_count(std::get<GateOp>(op));
  stages = std::max(stages, 1);
  // Word errors add at most linearly through products and embeddings, so
  // epsilon/stages per word is always enough. Independent word errors mostly
  // add in quadrature, so epsilon/√stages is tried first when the result can
  // be verified by contraction.
  std::vector<double> budgets;
  if (u.rows() <= kContractGuard && stages > 1) {
    budgets.push_back(opts.epsilon / std::sqrt(static_cast<double>(stages)));
  }
  budgets.push_back(opts.epsilon / stages);

  for (std::size_t attempt = 0; attempt < budgets.size(); ++attempt) {
    HybridContext ctx{*table, opts, tol, budgets[attempt], WordCache(opts.cache_enabled), 0,
                      Circuit(std::vector<int>(n, d)), d};
    try {
      for (const Operation& op : lowered.ops()) {
        const GateOp& g = std::get<GateOp>(op);
        if (g.gate.kind == GateKind::Multiplexer) {
          const std::vector<int> controls(g.targets.begin(), g.targets.end() - 1);
          ctx.emit(g.gate.control_map, controls, g.targets.back());
        } else {
          ctx.emit({g.gate.matrix()}, {}, g.targets.front());
        }
      }
    } catch (const SynthesisFailure& e) {
      throw SynthesisFailure(std::string("hybrid SK stage: ") + e.what());
    }
    report.cache_hits += ctx.cache.hits();
    report.cache_misses += ctx.cache.misses();
    report.sk_runs += ctx.sk_runs;
    report.word_tolerance = budgets[attempt];
    report.distance = verified_distance(ctx.out, u);
    if (report.distance > opts.epsilon && attempt + 1 < budgets.size()) continue;

    report.sk_ms = ms_since(sk_start);
    report.total_ms = ms_since(start);
    report.gates = count_gates(ctx.out);
    if (report.distance > opts.epsilon) {
      throw SynthesisFailure("hybrid circuit is " + format_real(report.distance) +
                             " from the input, above epsilon " + format_real(opts.epsilon));
    }
    return {std::move(ctx.out), report};
  }
  throw SynthesisFailure("hybrid compilation made no attempt");
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Csd:
      return "csd";
    case Method::Sk:
      return "sk";
    case Method::Hybrid:
      return "hybrid";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "csd") return Method::Csd;
  if (name == "sk") return Method::Sk;
  if (name == "hybrid") return Method::Hybrid;
  throw InvalidArgument("unknown method '" + name + "' (expected csd, sk or hybrid)");
}

int default_table_length(int d) {
  if (d == 2) return 10;
  if (d == 3) return 10;
  if (d == 4) return 7;
  return 5;
}

int default_multi_table_length(int d, int n) {
  (void)d;
  return n <= 2 ? 4 : 3;
}

std::shared_ptr<const ApproximationTable> standard_table(int d, int max_len) {
  require_dimension(d);
  return cached_table(d, 1, max_len > 0 ? max_len : default_table_length(d));
}

std::shared_ptr<const ApproximationTable> multi_qudit_table(int d, int n, int max_len) {
  require_dimension(d);
  if (n < 1) throw InvalidArgument("multi_qudit_table needs n >= 1");
  if (n == 1) return standard_table(d, max_len);
  return cached_table(d, n, max_len > 0 ? max_len : default_multi_table_length(d, n));
}

WordApproximation approximate_word(const ApproximationTable& table, const Matrix& u,
                                   double target, int max_depth, int translations,
                                   const Tolerances& tol) {
  if (!(target > 0)) throw InvalidArgument("word tolerance must be positive");
  if (max_depth < 0) throw InvalidArgument("SK depth must be non-negative");
  const BasisSet& basis = table.basis();

  // The plain recursion runs first. The fallback left factors w are spread
  // evenly over the table (which is sorted by word length) and ordered by how
  // well the table already covers w†U. Products of two table words cover the
  // group far more densely than the table itself.
  const std::size_t count =
      std::min<std::size_t>(table.size(), static_cast<std::size_t>(std::max(translations, 1)));
  std::vector<std::size_t> prefixes{0};
  for (std::size_t k = 1; k < count; ++k) prefixes.push_back(k * (table.size() - 1) / (count - 1));
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i : prefixes) {
    const Matrix shifted = table.entries()[i].matrix.adjoint() * u;
    order.emplace_back(table.nearest_index(shifted).second, i);
  }
  std::stable_sort(order.begin() + 1, order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  WordApproximation best;
  best.distance = std::numeric_limits<double>::infinity();
  int attempts = 0;
  std::string last_error;
  for (const auto& [base_dist, index] : order) {
    (void)base_dist;
    const GateWord& prefix = table.entries()[index];
    ++attempts;
    try {
      SkResult r = solovay_kitaev(table, prefix.matrix.adjoint() * u, max_depth, target, tol);
      if (r.distance < best.distance) {
        best.word = concat(prefix, r.word, basis);
        best.distance = r.distance;
        best.trace = std::move(r.trace);
      }
    } catch (const ConvergenceFailure& e) {
      last_error = e.what();
    }
    if (best.distance <= target) break;
  }
  best.attempts = attempts;
  if (!(best.distance <= target)) {
    std::string msg = "no word within " + format_real(target) + " after " +
                      std::to_string(attempts) + " Solovay-Kitaev runs";
    if (std::isfinite(best.distance)) msg += " (best " + format_real(best.distance) + ")";
    if (!last_error.empty()) msg += "; last failure: " + last_error;
    throw SynthesisFailure(msg);
  }
  return best;
}

void append_word(Circuit& circuit, const GateWord& word, const BasisSet& basis,
                 const std::vector<int>& qudits) {
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    const BasisLetter& letter = basis.letter(*it);
    std::vector<int> targets;
    for (int t : letter.targets) targets.push_back(qudits.at(static_cast<std::size_t>(t)));
    circuit.append(letter.gate, std::move(targets));
  }
}

GateCounts count_gates(const Circuit& circuit) {
  GateCounts c;
  auto tally = [&c](GateKind k) {
    switch (k) {
      case GateKind::H:
      case GateKind::Hdag:
        ++c.h;
        break;
      case GateKind::T:
      case GateKind::Tdag:
        ++c.t;
        break;
      case GateKind::SUM:
        ++c.sum;
        break;
      default:
        ++c.other;
    }
  };
  for (const Operation& op : circuit.ops()) {
    const auto* g = std::get_if<GateOp>(&op);
    if (!g) continue;
    if (g->gate.kind == GateKind::Multiplexer) {
      ++c.multiplexer;
      for (const auto& word : g->gate.branch_words) {
        for (GateKind k : word) tally(k);
      }
    } else {
      tally(g->gate.kind);
    }
  }
  return c;
}

std::pair<Circuit, CompileReport> compile_unitary(const Matrix& u, int d,
                                                  const CompileOptions& opts,
                                                  const Tolerances& tol) {
  require_dimension(d);
  if (!(opts.epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  if (opts.sk_depth < 0) throw InvalidArgument("sk_depth must be non-negative");
  if (u.rows() != u.cols()) throw ShapeMismatch("compile needs a square matrix");
  const int n = log_dim(u.rows(), d);
  if (n < 1) {
    throw InvalidDimension("matrix size " + std::to_string(u.rows()) + " is not a power of " +
                           std::to_string(d));
  }
  require_unitary(u, "compile input", tol.unitarity);
  CompileReport report;
  report.method = opts.method;
  report.d = d;
  report.n = n;
  report.epsilon = opts.epsilon;
  switch (opts.method) {
    case Method::Csd:
      return compile_csd(u, d, n, tol, report);
    case Method::Sk:
      return compile_sk(u, d, n, opts, tol, report);
    case Method::Hybrid:
      return compile_hybrid(u, d, n, opts, tol, report);
  }
  throw InvalidArgument("unknown compile method");
}

std::pair<Circuit, CompileReport> hybrid_compile(const Matrix& u, int d, CompileOptions opts,
                                                 const Tolerances& tol) {
  opts.method = Method::Hybrid;
  return compile_unitary(u, d, opts, tol);
}

int embedding_width(int d, int n, int e) {
  require_dimension(d);
  if (e < 2) throw InvalidDimension("target dimension must be at least 2");
  if (n < 1) throw InvalidArgument("embedding needs n >= 1");
  // Integer search avoids floating-point log ratios landing just above an
  // integer (e.g. log 8 / log 2).
  const long long need = int_pow(d, n);
  int m = 0;
  long long cap = 1;
  while (cap < need) {
    cap *= e;
    ++m;
  }
  return m;
}

std::pair<Matrix, int> retarget_unitary(const Matrix& a, int d, int n, int e) {
  const long long size = int_pow(d, n);
  if (a.rows() != size || a.cols() != size) {
    throw ShapeMismatch("retarget input is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + ", expected " + std::to_string(size));
  }
  const int m = embedding_width(d, n, e);
  std::vector<long long> leading(static_cast<std::size_t>(size));
  std::iota(leading.begin(), leading.end(), 0LL);
  return {subspace_choice(a, leading, int_pow(e, m)), m};
}

Matrix subspace_choice(const Matrix& a, const std::vector<long long>& placement, long long size) {
  if (a.rows() != a.cols() || a.rows() != static_cast<Eigen::Index>(placement.size())) {
    throw ShapeMismatch("placement has " + std::to_string(placement.size()) +
                        " indices for a matrix of size " + std::to_string(a.rows()));
  }
  if (size < static_cast<long long>(placement.size())) {
    throw InvalidArgument("placement is larger than the target space");
  }
  std::vector<bool> used(static_cast<std::size_t>(size), false);
  for (long long p : placement) {
    if (p < 0 || p >= size) {
      throw InvalidArgument("placement index " + std::to_string(p) + " is out of range");
    }
    if (used[static_cast<std::size_t>(p)]) {
      throw InvalidArgument("placement index " + std::to_string(p) + " is repeated");
    }
    used[static_cast<std::size_t>(p)] = true;
  }
  Matrix b = Matrix::Identity(size, size);
  for (std::size_t i = 0; i < placement.size(); ++i) {
    for (std::size_t j = 0; j < placement.size(); ++j) {
      b(placement[i], placement[j]) = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return b;
}

Circuit retarget_circuit(const Circuit& c, int e, const CompileOptions& opts,
                         const Tolerances& tol) {
  if (e < 2) throw InvalidDimension("target dimension must be at least 2");
  Circuit out;
  std::map<int, std::vector<int>> wires;
  for (const QuditDecl& q : c.qudits()) {
    const int m = q.dim == e ? 1 : embedding_width(q.dim, 1, e);
    for (int i = 0; i < m; ++i) wires[q.id].push_back(out.add_qudit(e));
  }

  for (const Operation& op : c.ops()) {
    if (const auto* meas = std::get_if<MeasureOp>(&op)) {
      std::vector<int> targets;
      for (int id : meas->targets) {
        const auto& w = wires.at(id);
        targets.insert(targets.end(), w.begin(), w.end());
      }
      out.measure(std::move(targets));
      continue;
    }
    const GateOp& g = std::get<GateOp>(op);
    const bool native = std::all_of(g.targets.begin(), g.targets.end(),
                                    [&](int id) { return c.dim_of(id) == e; });
    if (native) {
      std::vector<int> targets;
      for (int id : g.targets) targets.push_back(wires.at(id).front());
      out.append(g.gate, std::move(targets));
      continue;
    }

    // Local space of the gate in the original and embedded layouts.
    std::vector<int> local_dims;
    std::vector<int> group_sizes;
    std::vector<int> group_wires;
    for (int id : g.targets) {
      local_dims.push_back(c.dim_of(id));
      const auto& w = wires.at(id);
      group_sizes.push_back(static_cast<int>(int_pow(e, static_cast<int>(w.size()))));
      group_wires.insert(group_wires.end(), w.begin(), w.end());
    }
    const Matrix gate = g.gate.matrix();
    std::vector<long long> placement(static_cast<std::size_t>(gate.rows()));
    for (long long v = 0; v < gate.rows(); ++v) {
      placement[static_cast<std::size_t>(v)] = flat_index(group_sizes, digits_of(local_dims, v));
    }
    const long long size = int_pow(e, static_cast<int>(group_wires.size()));
    const Matrix embedded = subspace_choice(gate, placement, size);

    auto [sub, report] = compile_unitary(embedded, e, opts, tol);
    if (opts.method == Method::Csd && report.distance > tol.retarget) {
      throw SynthesisFailure("embedded gate compiled " + format_real(report.distance) +
                             " away from its target");
    }
    for (const Operation& sop : sub.ops()) {
      const GateOp& s = std::get<GateOp>(sop);
      std::vector<int> targets;
      for (int t : s.targets) targets.push_back(group_wires.at(static_cast<std::size_t>(t)));
      out.append(s.gate, std::move(targets));
    }
  }
  return out;
}

}  // namespace qudcomp
