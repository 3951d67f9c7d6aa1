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

#include "qudcomp/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "qudcomp/csd.hpp"
#include "qudcomp/errors.hpp"
#include "qudcomp/json_io.hpp"
#include "qudcomp/linalg.hpp"
#include "qudcomp/pipeline.hpp"
#include "qudcomp/random.hpp"
#include "qudcomp/sim.hpp"

namespace qudcomp {

namespace {

struct Flags {
  std::string input;
  std::string output;
  std::string report;
  std::string method = "hybrid";
  double epsilon = 0.05;
  int sk_depth = 4;
  std::string table;
  int dim = 0;
  int target_dim = 2;
  long long shots = 1000;
  std::uint64_t seed = 1;
  bool dump_ir = false;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument(path + ": cannot open file for writing");
  f << text;
  if (!f) throw InvalidArgument(path + ": write failed");
}

std::string dumped(const Json& j) { return j.dump(2) + "\n"; }

// Smallest d ≥ 2 of which `size` is a power.
int infer_dimension(long long size) {
  for (int d = 2; d <= size; ++d) {
    if (log_dim(size, d) >= 1) return d;
  }
  throw InvalidDimension("cannot infer a qudit dimension for size " + std::to_string(size));
}

std::shared_ptr<const ApproximationTable> table_for(int d, const std::string& path,
                                                    std::ostream& err) {
  if (path.empty()) return standard_table(d);
  const BasisSet basis = BasisSet::standard(d);
  if (std::filesystem::exists(path)) {
    return std::make_shared<const ApproximationTable>(load_table(path, basis));
  }
  auto table = standard_table(d);
  save_table(*table, path);
  err << "saved table (" << table->size() << " entries) to " << path << "\n";
  return table;
}

CompileOptions options_from(const Flags& f, int d, std::ostream& err) {
  CompileOptions o;
  o.method = method_from_string(f.method);
  o.epsilon = f.epsilon;
  o.sk_depth = f.sk_depth;
  if (o.method != Method::Csd) o.table = table_for(d, f.table, err);
  return o;
}

int cmd_synth(const Flags& f, std::ostream& out, std::ostream& err) {
  const Matrix u = matrix_from_json(read_json_file(f.input));
  require_unitary(u, "input", default_tolerances().unitarity);
  const int d = f.dim > 0 ? f.dim : infer_dimension(u.rows());
  const CompileOptions opts = options_from(f, d, err);
  if (f.dump_ir) {
    const Circuit ir = csd_compile(u, d);
    err << dumped(to_json(ir));
  }
  auto [circuit, report] = compile_unitary(u, d, opts);
  emit(f.output, dumped(to_json(circuit)), out);
  const std::string rep = dumped(to_json(report));
  if (f.report.empty()) {
    err << rep;
  } else {
    emit(f.report, rep, out);
  }
  return kExitOk;
}

// Replaces every gate that is not an elementary gate or SUM by a compiled
// circuit over the same qudits.
int cmd_compile(const Flags& f, std::ostream& out, std::ostream& err) {
  const Circuit c = circuit_from_json(read_json_file(f.input));
  Circuit result;
  for (const QuditDecl& q : c.qudits()) result.add_qudit(q.id, q.dim);
  Json reports = Json::array();
  std::optional<CompileOptions> cached;
  int cached_dim = 0;
  for (const Operation& op : c.ops()) {
    if (const auto* m = std::get_if<MeasureOp>(&op)) {
      result.measure(m->targets);
      continue;
    }
    const GateOp& g = std::get<GateOp>(op);
    if (g.gate.is_elementary() || g.gate.kind == GateKind::SUM) {
      result.append(g);
      continue;
    }
    const int d = g.gate.dims.front();
    for (int dim : g.gate.dims) {
      if (dim != d) {
        throw InvalidArgument("compile needs gates on qudits of one dimension; use map first");
      }
    }
    if (!cached || cached_dim != d) {
      cached = options_from(f, d, err);
      cached_dim = d;
    }
    auto [sub, report] = compile_unitary(g.gate.matrix(), d, *cached);
    reports.push_back(to_json(report));
    for (const Operation& sop : sub.ops()) {
      const GateOp& s = std::get<GateOp>(sop);
      std::vector<int> targets;
      for (int t : s.targets) targets.push_back(g.targets.at(static_cast<std::size_t>(t)));
      result.append(s.gate, std::move(targets));
    }
  }
  emit(f.output, dumped(to_json(result)), out);
  const std::string rep = dumped(reports);
  if (f.report.empty()) {
    err << rep;
  } else {
    emit(f.report, rep, out);
  }
  return kExitOk;
}

int cmd_map(const Flags& f, std::ostream& out, std::ostream& err) {
  const Circuit c = circuit_from_json(read_json_file(f.input));
  CompileOptions opts;
  opts.method = method_from_string(f.method);
  opts.epsilon = f.epsilon;
  opts.sk_depth = f.sk_depth;
  if (opts.method != Method::Csd) opts.table = table_for(f.target_dim, f.table, err);
  const Circuit mapped = retarget_circuit(c, f.target_dim, opts);
  emit(f.output, dumped(to_json(mapped)), out);
  return kExitOk;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream&) {
  const Circuit c = circuit_from_json(read_json_file(f.input));
  const StateVector state = run_statevector(c);
  std::vector<int> ids;
  for (const QuditDecl& q : c.qudits()) ids.push_back(q.id);
  if (c.has_measurements()) {
    const CountsResult counts = sample(state, ids, c.measured_ids(), f.shots, f.seed);
    emit(f.output, dumped(to_json(counts)), out);
    return kExitOk;
  }
  // No measurement: dump the exact distribution over all qudits.
  Json probs = Json::object();
  for (const auto& [outcome, p] : marginal(state, ids, ids)) {
    if (p > 0) probs[CountsResult::key(outcome)] = p;
  }
  Json j = {{"mode", "distribution"}, {"ids", ids}, {"probabilities", std::move(probs)},
            {"state", to_json(state)}};
  emit(f.output, dumped(j), out);
  return kExitOk;
}

int cmd_bench(const Flags& f, std::ostream& out, std::ostream& err) {
  const Json spec = read_json_file(f.input);
  auto get_int = [&](const char* key, long long fallback) {
    auto it = spec.find(key);
    if (it == spec.end()) return fallback;
    if (!it->is_number_integer()) throw ParseError(f.input + ": $." + key + ": expected an integer");
    return it->get<long long>();
  };
  const int d = static_cast<int>(get_int("d", 0));
  const int n = static_cast<int>(get_int("n", 0));
  const int trials = static_cast<int>(get_int("trials", 1));
  const auto seed = static_cast<std::uint64_t>(get_int("seed", static_cast<long long>(f.seed)));
  double epsilon = f.epsilon;
  if (auto it = spec.find("epsilon"); it != spec.end()) {
    if (!it->is_number() || !(it->get<double>() > 0)) {
      throw ParseError(f.input + ": $.epsilon: expected a positive number");
    }
    epsilon = it->get<double>();
  }
  if (d < 2 || n < 1 || trials < 1) {
    throw ParseError(f.input + ": d >= 2, n >= 1 and trials >= 1 are required");
  }
  std::vector<Method> methods;
  auto mit = spec.find("methods");
  if (mit == spec.end() || !mit->is_array()) {
    throw ParseError(f.input + ": $.methods: expected an array of method names");
  }
  for (const Json& m : *mit) {
    if (!m.is_string()) throw ParseError(f.input + ": $.methods: expected strings");
    try {
      methods.push_back(method_from_string(m.get<std::string>()));
    } catch (const InvalidArgument& e) {
      throw ParseError(f.input + ": $.methods: " + e.what());
    }
  }

  // Tables are built before any timing starts.
  CompileOptions base;
  base.epsilon = epsilon;
  base.sk_depth = f.sk_depth;
  base.table = table_for(d, f.table, err);
  for (Method m : methods) {
    if (m == Method::Sk && n > 1) base.multi_table = multi_qudit_table(d, n);
  }

  std::ostringstream csv;
  csv << csv_header() << "\n";
  bool all_ok = true;
  const long long size = int_pow(d, n);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed + static_cast<std::uint64_t>(trial));
    const Matrix u = random_unitary(static_cast<int>(size), rng);
    for (Method m : methods) {
      CompileOptions opts = base;
      opts.method = m;
      const auto start = std::chrono::steady_clock::now();
      try {
        csv << csv_row(compile_unitary(u, d, opts).second, trial) << "\n";
      } catch (const Error& e) {
        all_ok = false;
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        err << "trial " << trial << " " << to_string(m) << ": " << e.what() << "\n";
        CompileReport failed;
        failed.method = m;
        failed.d = d;
        failed.n = n;
        failed.epsilon = epsilon;
        failed.total_ms = ms;
        std::string row = csv_row(failed, trial);
        row = row.substr(0, row.rfind(',')) + ",failed";
        csv << row << "\n";
      }
    }
  }
  emit(f.output, csv.str(), out);
  return all_ok ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qudcomp: qudit circuit synthesis, retargeting and simulation"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&f](CLI::App* sub, const char* input_help) {
    sub->add_option("input", f.input, input_help)->required();
    sub->add_option("-o,--output", f.output, "Output path (stdout when omitted)");
  };
  auto add_compile_flags = [&f](CLI::App* sub) {
    sub->add_option("--method", f.method, "csd, sk or hybrid")
        ->check(CLI::IsMember({"csd", "sk", "hybrid"}));
    sub->add_option("--epsilon", f.epsilon, "Target phase-invariant distance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sk-depth", f.sk_depth, "Deepest Solovay-Kitaev level")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--table", f.table, "Approximation table file (built and saved if missing)");
  };

  CLI::App* synth = app.add_subcommand("synth", "Compile a unitary (JSON matrix) to a circuit");
  add_common(synth, "Unitary JSON file");
  add_compile_flags(synth);
  synth->add_option("--dim", f.dim, "Qudit dimension (inferred when omitted)")
      ->check(CLI::Range(2, 1 << 14));
  synth->add_option("--report", f.report, "Write the compile report here");
  synth->add_flag("--dump-ir", f.dump_ir, "Print the CSD intermediate circuit to stderr");

  CLI::App* compile = app.add_subcommand("compile", "Compile every non-elementary gate of a circuit");
  add_common(compile, "Circuit JSON file");
  add_compile_flags(compile);
  compile->add_option("--report", f.report, "Write the per-gate reports here");

  CLI::App* map = app.add_subcommand("map", "Retarget a circuit to qudits of another dimension");
  add_common(map, "Circuit JSON file");
  add_compile_flags(map);
  map->add_option("--target-dim", f.target_dim, "Target qudit dimension")
      ->required()
      ->check(CLI::Range(2, 64));

  CLI::App* simulate = app.add_subcommand("simulate", "Run a circuit on the state-vector simulator");
  add_common(simulate, "Circuit JSON file");
  simulate->add_option("--shots", f.shots, "Number of samples")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", f.seed, "Sampler seed");

  CLI::App* bench = app.add_subcommand("bench", "Time compile methods on random unitaries (CSV)");
  add_common(bench, "Benchmark spec JSON file");
  bench->add_option("--epsilon", f.epsilon, "Default target distance")->check(CLI::PositiveNumber);
  bench->add_option("--sk-depth", f.sk_depth, "Deepest Solovay-Kitaev level")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--table", f.table, "Approximation table file");
  bench->add_option("--seed", f.seed, "Seed when the spec has none");

  // The default for synth/compile/map is the method flag; csd is the exact
  // choice for map.
  map->preparse_callback([&f](std::size_t) { f.method = "csd"; });

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (synth->parsed()) return cmd_synth(f, out, err);
    if (compile->parsed()) return cmd_compile(f, out, err);
    if (map->parsed()) return cmd_map(f, out, err);
    if (simulate->parsed()) return cmd_simulate(f, out, err);
    if (bench->parsed()) return cmd_bench(f, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NotUnitary& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitInput;
}

}  // namespace qudcomp
