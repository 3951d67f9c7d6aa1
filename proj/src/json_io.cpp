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

#include "qudcomp/json_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qudcomp/errors.hpp"

namespace qudcomp {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

long long read_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

double read_real(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a finite number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

std::vector<int> read_ints(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(static_cast<int>(read_int(j[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

Json real_array(const Vector& v, bool imag) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(imag ? v(i).imag() : v(i).real());
  return a;
}

// Wraps library errors raised while rebuilding an object from JSON.
template <typename F>
auto rethrow_at(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

}  // namespace

Json to_json(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("only square matrices serialize");
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  const long long n = read_int(field(j, "dim", path), path + ".dim");
  if (n < 1 || n > (1 << 14)) fail(path + ".dim", "dimension out of range");
  const Json& re = field(j, "re", path);
  const Json& im = field(j, "im", path);
  const auto count = static_cast<std::size_t>(n * n);
  if (!re.is_array() || re.size() != count) {
    fail(path + ".re", "expected " + std::to_string(count) + " numbers");
  }
  if (!im.is_array() || im.size() != count) {
    fail(path + ".im", "expected " + std::to_string(count) + " numbers");
  }
  Matrix m(n, n);
  for (std::size_t k = 0; k < count; ++k) {
    const std::string at = "[" + std::to_string(k) + "]";
    m(static_cast<Eigen::Index>(k) / n, static_cast<Eigen::Index>(k) % n) =
        Complex(read_real(re[k], path + ".re" + at), read_real(im[k], path + ".im" + at));
  }
  return m;
}

Json to_json(const GateRef& g) {
  Json j = {{"kind", to_string(g.kind)},
            {"dims", g.dims},
            {"power", g.power},
            {"payload", g.payload ? to_json(*g.payload) : Json(nullptr)}};
  if (!g.control_map.empty()) {
    Json blocks = Json::array();
    for (const Matrix& b : g.control_map) blocks.push_back(to_json(b));
    j["control_map"] = std::move(blocks);
  }
  if (!g.label.empty()) j["label"] = g.label;
  if (!g.branch_words.empty()) {
    Json words = Json::array();
    for (const auto& w : g.branch_words) {
      Json letters = Json::array();
      for (GateKind k : w) letters.push_back(to_string(k));
      words.push_back(std::move(letters));
    }
    j["branch_words"] = std::move(words);
  }
  return j;
}

GateRef gate_from_json(const Json& j, const std::string& path) {
  const Json& kind = field(j, "kind", path);
  if (!kind.is_string()) fail(path + ".kind", "expected a string");
  GateRef g;
  g.kind = rethrow_at(path + ".kind", [&] { return gate_kind_from_string(kind.get<std::string>()); });
  g.dims = read_ints(field(j, "dims", path), path + ".dims");
  if (auto it = j.find("power"); it != j.end()) {
    g.power = static_cast<int>(read_int(*it, path + ".power"));
  }
  if (auto it = j.find("payload"); it != j.end() && !it->is_null()) {
    g.payload = matrix_from_json(*it, path + ".payload");
  }
  if (auto it = j.find("control_map"); it != j.end()) {
    if (!it->is_array()) fail(path + ".control_map", "expected an array of matrices");
    for (std::size_t i = 0; i < it->size(); ++i) {
      g.control_map.push_back(
          matrix_from_json((*it)[i], path + ".control_map[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) fail(path + ".label", "expected a string");
    g.label = it->get<std::string>();
  }
  if (auto it = j.find("branch_words"); it != j.end()) {
    if (!it->is_array()) fail(path + ".branch_words", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string at = path + ".branch_words[" + std::to_string(i) + "]";
      const Json& w = (*it)[i];
      if (!w.is_array()) fail(at, "expected an array of gate kinds");
      std::vector<GateKind> word;
      for (const Json& letter : w) {
        if (!letter.is_string()) fail(at, "expected gate kind strings");
        word.push_back(rethrow_at(at, [&] { return gate_kind_from_string(letter.get<std::string>()); }));
      }
      g.branch_words.push_back(std::move(word));
    }
  }
  rethrow_at(path, [&] {
    g.validate();
    return 0;
  });
  return g;
}

Json to_json(const Circuit& c) {
  Json qudits = Json::array();
  for (const QuditDecl& q : c.qudits()) qudits.push_back({{"id", q.id}, {"dim", q.dim}});
  Json ops = Json::array();
  for (const Operation& op : c.ops()) {
    if (const auto* g = std::get_if<GateOp>(&op)) {
      ops.push_back({{"gate", to_json(g->gate)}, {"targets", g->targets}});
    } else {
      ops.push_back({{"measure", std::get<MeasureOp>(op).targets}});
    }
  }
  return {{"qudits", std::move(qudits)}, {"ops", std::move(ops)}};
}

Circuit circuit_from_json(const Json& j) {
  const Json& qudits = field(j, "qudits", "$");
  if (!qudits.is_array()) fail("$.qudits", "expected an array");
  Circuit c;
  for (std::size_t i = 0; i < qudits.size(); ++i) {
    const std::string at = "$.qudits[" + std::to_string(i) + "]";
    const int id = static_cast<int>(read_int(field(qudits[i], "id", at), at + ".id"));
    const int dim = static_cast<int>(read_int(field(qudits[i], "dim", at), at + ".dim"));
    rethrow_at(at, [&] {
      c.add_qudit(id, dim);
      return 0;
    });
  }
  const Json& ops = field(j, "ops", "$");
  if (!ops.is_array()) fail("$.ops", "expected an array");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string at = "$.ops[" + std::to_string(i) + "]";
    const Json& op = ops[i];
    if (op.is_object() && op.contains("measure")) {
      std::vector<int> targets = read_ints(op["measure"], at + ".measure");
      rethrow_at(at, [&] {
        c.measure(std::move(targets));
        return 0;
      });
      continue;
    }
    GateRef g = gate_from_json(field(op, "gate", at), at + ".gate");
    std::vector<int> targets = read_ints(field(op, "targets", at), at + ".targets");
    rethrow_at(at, [&] {
      c.append(std::move(g), std::move(targets));
      return 0;
    });
  }
  return c;
}

Json to_json(const PauliProduct& p) {
  return {{"d", p.d}, {"lambda", p.lambda}, {"x", p.x}, {"z", p.z}};
}

PauliProduct pauli_from_json(const Json& j, const std::string& path) {
  const int d = static_cast<int>(read_int(field(j, "d", path), path + ".d"));
  const int lambda = static_cast<int>(read_int(field(j, "lambda", path), path + ".lambda"));
  std::vector<int> x = read_ints(field(j, "x", path), path + ".x");
  std::vector<int> z = read_ints(field(j, "z", path), path + ".z");
  return rethrow_at(path, [&] { return PauliProduct(d, lambda, std::move(x), std::move(z)); });
}

Json to_json(const CountsResult& c) {
  Json counts = Json::object();
  for (const auto& [outcome, n] : c.counts) counts[CountsResult::key(outcome)] = n;
  return {{"shots", c.shots},
          {"seed", c.seed},
          {"rng", c.rng},
          {"measured", c.measured},
          {"counts", std::move(counts)}};
}

Json to_json(const StateVector& s) {
  return {{"dims", s.dims},
          {"dim", s.size()},
          {"re", real_array(s.amplitudes, false)},
          {"im", real_array(s.amplitudes, true)}};
}

Json to_json(const CompileReport& r) {
  return {{"method", to_string(r.method)},
          {"d", r.d},
          {"n", r.n},
          {"epsilon", r.epsilon},
          {"csd_ms", r.csd_ms},
          {"sk_ms", r.sk_ms},
          {"total_ms", r.total_ms},
          {"csd_factors", r.csd_factors},
          {"csd_ops", r.csd_ops},
          {"gates",
           {{"H", r.gates.h},
            {"T", r.gates.t},
            {"SUM", r.gates.sum},
            {"multiplexer", r.gates.multiplexer},
            {"other", r.gates.other}}},
          {"distance", r.distance},
          {"cache_hits", r.cache_hits},
          {"cache_misses", r.cache_misses},
          {"sk_runs", r.sk_runs},
          {"word_tolerance", r.word_tolerance}};
}

std::string csv_header() {
  return "method,d,n,trial,epsilon,csd_ms,sk_ms,total_ms,gate_h,gate_t,gate_sum,distance";
}

std::string csv_row(const CompileReport& r, int trial) {
  std::ostringstream os;
  os << to_string(r.method) << ',' << r.d << ',' << r.n << ',' << trial << ',' << r.epsilon
     << ',' << std::fixed << std::setprecision(3) << r.csd_ms << ',' << r.sk_ms << ','
     << r.total_ms << ',' << r.gates.h << ',' << r.gates.t << ',' << r.gates.sum << ','
     << std::scientific << std::setprecision(6) << r.distance;
  return os.str();
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument(path + ": cannot open file for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InvalidArgument(path + ": write failed");
}

}  // namespace qudcomp
