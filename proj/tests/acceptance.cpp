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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "programs.hpp"
#include "qudcomp/builder.hpp"
#include "qudcomp/csd.hpp"
#include "qudcomp/errors.hpp"
#include "qudcomp/gates.hpp"
#include "qudcomp/json_io.hpp"
#include "qudcomp/linalg.hpp"
#include "qudcomp/pauli.hpp"
#include "qudcomp/pipeline.hpp"
#include "qudcomp/random.hpp"
#include "qudcomp/sim.hpp"
#include "qudcomp/sk.hpp"

using namespace qudcomp;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome csd_reconstruction() {
  const auto start = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  int count = 0;
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
    const int dim = static_cast<int>(std::pow(d, n));
    for (int i = 0; i < 100; ++i) {
      const Matrix u = random_unitary(dim, rng);
      worst = std::max(worst, oracle::max_abs(reconstruct(csd_qudit(u, d), dim) - u));
      ++count;
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-9 && t < 30.0,
          std::to_string(count) + " unitaries, max residual " + fmt("%.2e", worst) + ", " +
              fmt("%.2f", t) + " s"};
}

Outcome lie_identity() {
  Rng rng(202);
  double worst = 0.0;
  for (int d = 2; d <= 5; ++d) {
    const StructureTensors t = structure_constants(d);
    const auto basis = gellmann_basis(d);
    const int n = d * d - 1;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> a(n), b(n);
      for (double& x : a) x = rng.normal();
      for (double& x : b) x = rng.normal();
      const Matrix lhs = generator_from_coeffs(a, d) * generator_from_coeffs(b, d);
      double ab = 0;
      for (int i = 0; i < n; ++i) ab += a[i] * b[i];
      const auto sym = dot_sym(a, b, t);
      const auto anti = cross(a, b, t);
      Matrix rhs = (2.0 / d) * ab * Matrix::Identity(d, d);
      for (int j = 0; j < n; ++j) rhs += Complex(sym[j], anti[j]) * basis[j];
      worst = std::max(worst, oracle::max_abs(lhs - rhs));
    }
  }
  const StructureTensors t2 = structure_constants(2);
  double f_err = 0.0, d_max = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        f_err = std::max(f_err, std::abs(t2.f_at(i, j, k) - oracle::levi_civita(i, j, k)));
        d_max = std::max(d_max, std::abs(t2.d_at(i, j, k)));
      }
    }
  }
  // Structure constants come from floating-point traces, so "exact" is taken
  // as agreement to a few ulps.
  return {worst <= 1e-10 && f_err <= 1e-15 && d_max <= 1e-15,
          "max entry error " + fmt("%.2e", worst) + " over d=2..5; d=2 |f-eps| " +
              fmt("%.1e", f_err) + ", |dsym| " + fmt("%.1e", d_max)};
}

Outcome sk_exact_z() {
  CompileOptions opts;
  opts.method = Method::Sk;
  const auto [c, report] = compile_unitary(pauli_z(2), 2, opts);
  // Distance 0 is read with the 1e-12 slack used for exact table words.
  const bool ok = report.gates.h == 0 && report.gates.t == 4 && report.distance <= 1e-12 &&
                  report.gates.sum == 0 && report.gates.other == 0;
  std::string detail = "d=2: H " + std::to_string(report.gates.h) + ", T " +
                       std::to_string(report.gates.t) + ", distance " +
                       fmt("%.1e", report.distance);
  try {
    const auto [c3, r3] = compile_unitary(pauli_z(3), 3, opts);
    detail += "; d=3 (reported only): H " + std::to_string(r3.gates.h) + ", T " +
              std::to_string(r3.gates.t) + ", distance " + fmt("%.1e", r3.distance);
  } catch (const Error& e) {
    detail += std::string("; d=3 (reported only): ") + e.what();
  }
  return {ok, detail};
}

Outcome sk_convergence() {
  const ApproximationTable table = build_table(BasisSet::standard(2), 10);
  Rng rng(404);
  const int depth = 4;
  std::vector<double> level_max(depth + 1, 0.0);
  std::vector<double> px, py;
  bool monotone = true;
  double worst_final = 0.0;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const Matrix u = random_special_unitary(2, rng);
    try {
      const SkResult r = solovay_kitaev(table, u, depth);
      // An early exit at distance 0 leaves a short trace; pad it.
      std::vector<double> tr = r.trace;
      while (static_cast<int>(tr.size()) < depth + 1) tr.push_back(tr.back());
      for (int k = 0; k <= depth; ++k) level_max[k] = std::max(level_max[k], tr[k]);
      for (int k = 0; k < depth; ++k) {
        if (tr[k + 1] > tr[k]) monotone = false;
        if (tr[k + 1] > 0) {
          px.push_back(std::log(tr[k]));
          py.push_back(std::log(tr[k + 1]));
        }
      }
      worst_final = std::max(worst_final, r.distance);
    } catch (const ConvergenceFailure&) {
      ++failures;
    }
  }
  std::vector<double> lx, ly;
  for (int k = 0; k < depth; ++k) {
    lx.push_back(std::log(level_max[k]));
    ly.push_back(std::log(level_max[k + 1]));
  }
  const double s = slope(lx, ly);
  const bool ok = failures == 0 && monotone && worst_final <= 0.01 && s >= 1.4;
  std::string levels;
  for (double e : level_max) levels += (levels.empty() ? "" : " ") + fmt("%.3g", e);
  return {ok, "eps0 " + fmt("%.3f", table.achieved_epsilon0()) + ", worst trace [" + levels +
                  "], max eps4 " + fmt("%.2e", worst_final) + ", slope of worst trace " +
                  fmt("%.2f", s) + " (pooled per-step " + fmt("%.2f", slope(px, py)) +
                  "), non-increasing " + (monotone ? "yes" : "no") + ", failures " +
                  std::to_string(failures)};
}

Outcome hybrid_vs_sk() {
  CompileOptions hybrid;
  hybrid.method = Method::Hybrid;
  hybrid.epsilon = 0.05;
  hybrid.table = standard_table(3);
  CompileOptions sk = hybrid;
  sk.method = Method::Sk;
  sk.multi_table = multi_qudit_table(3, 2);

  Rng rng(505);
  std::vector<double> t_h, t_sk;
  double worst = 0.0;
  std::size_t hits = 0, min_hits = std::numeric_limits<std::size_t>::max();
  int h_fail = 0, sk_fail = 0;
  std::vector<double> sk_fail_times;
  for (int i = 0; i < 10; ++i) {
    const Matrix u = random_unitary(9, rng);
    auto start = Clock::now();
    try {
      const auto [c, r] = compile_unitary(u, 3, hybrid);
      t_h.push_back(seconds_since(start));
      worst = std::max(worst, oracle::trace_dist(contract_to_unitary(c), u));
      hits += r.cache_hits;
      min_hits = std::min(min_hits, r.cache_hits);
    } catch (const Error&) {
      t_h.push_back(std::numeric_limits<double>::infinity());
      ++h_fail;
    }
    start = Clock::now();
    try {
      const auto [c, r] = compile_unitary(u, 3, sk);
      t_sk.push_back(seconds_since(start));
    } catch (const SynthesisFailure&) {
      // No circuit within epsilon: the time to a solution is unbounded.
      sk_fail_times.push_back(seconds_since(start));
      t_sk.push_back(std::numeric_limits<double>::infinity());
      ++sk_fail;
    }
  }
  const double mh = median(t_h), msk = median(t_sk);
  const bool ok = h_fail == 0 && worst <= 0.05 && mh <= msk && hits > 0;
  std::string detail = "hybrid max distance " + fmt("%.4f", worst) + ", hybrid median " +
                       fmt("%.2f", mh) + " s, pure SK median time-to-solution " +
                       (std::isinf(msk) ? std::string("inf") : fmt("%.2f", msk) + " s") +
                       " (SK failed " + std::to_string(sk_fail) + "/10";
  if (!sk_fail_times.empty()) detail += ", giving up after median " + fmt("%.2f", median(sk_fail_times)) + " s";
  detail += "), cache hits " + std::to_string(hits) + " total, min per run " +
            std::to_string(h_fail == 10 ? 0 : min_hits);
  return {ok, detail};
}

Outcome pauli_algebra() {
  std::size_t pairs = 0;
  double worst = 0.0;
  for (int d = 2; d <= 3; ++d) {
    for (int n = 1; n <= 2; ++n) {
      const auto group = enumerate_group(d, n);
      std::vector<Matrix> mats;
      for (const auto& p : group) mats.push_back(matrix_of(p));
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = 0; j < group.size(); ++j) {
          worst = std::max(worst, oracle::max_abs(matrix_of(pauli_mul(group[i], group[j])) - mats[i] * mats[j]));
          ++pairs;
        }
      }
    }
  }
  // Closure of {X, Z} under multiplication, by matrices alone.
  std::vector<Matrix> closure{Matrix::Identity(3, 3)};
  const std::vector<Matrix> gens{pauli_x(3), pauli_z(3)};
  for (std::size_t i = 0; i < closure.size(); ++i) {
    for (const Matrix& g : gens) {
      const Matrix m = closure[i] * g;
      const bool seen = std::any_of(closure.begin(), closure.end(),
                                    [&](const Matrix& c) { return oracle::max_abs(c - m) < 1e-9; });
      if (!seen) closure.push_back(m);
    }
  }
  const bool ok = worst <= 1e-10 && closure.size() == 27 && enumerate_group(3, 1).size() == 27;
  return {ok, std::to_string(pairs) + " products, max error " + fmt("%.1e", worst) +
                  "; qutrit closure order " + std::to_string(closure.size())};
}

Outcome clifford_classes() {
  bool ok = is_clifford(hadamard(2), 2, 1).is_clifford && is_clifford(sum_gate(2, 2), 2, 2).is_clifford;
  int paulis = 0;
  for (int d = 2; d <= 3; ++d) {
    for (int n = 1; n <= 2; ++n) {
      for (const auto& p : enumerate_group(d, n)) {
        ok = ok && is_clifford(matrix_of(p), d, n).is_clifford;
        ++paulis;
      }
    }
  }
  const CliffordCheck t = is_clifford(tgate(2), 2, 1);
  const CliffordCheck h3 = is_clifford(hadamard(3), 3, 1);
  const CliffordCheck s3 = is_clifford(sum_gate(3, 3), 3, 2);
  ok = ok && !t.is_clifford && h3.is_clifford && h3.tableau && s3.is_clifford && s3.tableau;
  return {ok, "H2, SUM2 and " + std::to_string(paulis) + " Paulis Clifford; T2 " +
                  (t.is_clifford ? "Clifford" : "non-Clifford") + "; H3 and SUM3 tableaux " +
                  (h3.tableau && s3.tableau ? "returned" : "missing")};
}

Outcome simulator_counts() {
  Builder b;
  const QuditHandle q = b.alloc_qudit(2);
  const QuditHandle r = b.alloc_qudit(3);
  auto [c, t] = b.sum(b.hadamard(q), r);
  const std::vector<QuditHandle> both{c, t};
  b.measure(both);
  const Circuit circuit = b.circuit();
  std::vector<int> ids;
  for (const auto& decl : circuit.qudits()) ids.push_back(decl.id);
  const StateVector s = run_statevector(circuit);
  const CountsResult a = sample(s, ids, circuit.measured_ids(), 10000, 808);
  const CountsResult a2 = sample(s, ids, circuit.measured_ids(), 10000, 808);
  const std::string bytes = to_json(a).dump(2), bytes2 = to_json(a2).dump(2);
  const double sigma = std::sqrt(10000 * 0.25);
  long long n00 = 0, n11 = 0, other = 0;
  for (const auto& [k, v] : a.counts) {
    if (k == std::vector<int>{0, 0}) n00 = v;
    else if (k == std::vector<int>{1, 1}) n11 = v;
    else other += v;
  }
  const bool ok = std::abs(n00 - 5000.0) <= 3 * sigma && std::abs(n11 - 5000.0) <= 3 * sigma &&
                  other == 0 && bytes == bytes2;
  return {ok, "(0,0) " + std::to_string(n00) + ", (1,1) " + std::to_string(n11) + ", other " +
                  std::to_string(other) + ", 3 sigma " + fmt("%.0f", 3 * sigma) +
                  ", reseeded output " + (bytes == bytes2 ? "byte-identical" : "differs")};
}

Outcome embedding_fidelity() {
  CompileOptions opts;
  opts.method = Method::Csd;
  Circuit h({3});
  h.append(GateRef::h(3), {0});
  h.measure({0});
  const Circuit q = retarget_circuit(h, 2, opts);
  const StateVector s = run_statevector(q);
  double worst = 0.0;
  for (long long k = 0; k < 4; ++k) {
    const double expected = k < 3 ? 1.0 / 3.0 : 0.0;
    worst = std::max(worst, std::abs(std::norm(s.amplitudes(k)) - expected));
  }
  Matrix x_tilde = Matrix::Zero(4, 4);
  x_tilde(0, 1) = x_tilde(1, 2) = x_tilde(2, 0) = x_tilde(3, 3) = 1.0;
  const double direct = oracle::max_abs(retarget_unitary(pauli_x(3), 3, 1, 2).first - x_tilde);
  Circuit x({3});
  x.append(GateRef::x(3), {0});
  const double compiled = oracle::max_abs(contract_to_unitary(retarget_circuit(x, 2, opts)) - x_tilde);
  const bool ok = worst <= 1e-12 && direct == 0.0 && compiled <= 1e-10;
  return {ok, "max |p - 1/3| " + fmt("%.1e", worst) + "; X3 embedding entry error " +
                  fmt("%.1e", direct) + ", compiled circuit " + fmt("%.1e", compiled)};
}

Outcome linearity() {
  std::mt19937_64 gen(1010);
  int programs = 0, accepted = 0, rejected = 0;
  while (programs < 1000) {
    const testing::Program p = testing::random_program(gen);
    const int inject = testing::injection_point(p);
    if (inject == 0) continue;
    ++programs;
    try {
      testing::replay(p, 0);
      ++accepted;
    } catch (const Error&) {
    }
    try {
      testing::replay(p, inject);
    } catch (const LinearityViolation&) {
      ++rejected;
    }
  }
  return {accepted == 1000 && rejected == 1000,
          "rejected " + std::to_string(rejected) + "/1000 injected, accepted " +
              std::to_string(accepted) + "/1000 clean"};
}

Outcome retarget_round_trip() {
  CompileOptions opts;
  opts.method = Method::Csd;
  Rng rng(1111);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_unitary(3, rng);
    Circuit c({3});
    c.append(GateRef::custom(a, {3}), {0});
    const Circuit q = retarget_circuit(c, 2, opts);
    const CircuitDag dag = to_dag(q);
    for (int j = 0; j < 3; ++j) {
      const StateVector out = run_statevector(dag, StateVector::basis({2, 2}, digits_of({2, 2}, j)));
      for (int k = 0; k < 4; ++k) {
        const Complex expected = k < 3 ? a(k, j) : Complex{0.0, 0.0};
        worst = std::max(worst, std::abs(out.amplitudes(k) - expected));
      }
    }
  }
  return {worst <= 1e-10, "50 random qutrit unitaries, max amplitude error " + fmt("%.1e", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"CSD reconstruction", csd_reconstruction},
      {"Lie-algebra product identity", lie_identity},
      {"SK exact Z", sk_exact_z},
      {"SK convergence", sk_convergence},
      {"hybrid soundness and speed", hybrid_vs_sk},
      {"Pauli algebra", pauli_algebra},
      {"Clifford classification", clifford_classes},
      {"simulator distribution", simulator_counts},
      {"embedding fidelity", embedding_fidelity},
      {"linearity enforcement", linearity},
      {"retarget round trip", retarget_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
