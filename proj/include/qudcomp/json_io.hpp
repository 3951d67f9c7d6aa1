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

#include <string>

#include "json.hpp"
#include "qudcomp/circuit.hpp"
#include "qudcomp/pauli.hpp"
#include "qudcomp/pipeline.hpp"
#include "qudcomp/sim.hpp"

namespace qudcomp {

using Json = nlohmann::json;

// Readers throw ParseError naming the offending location as a JSON path
// ("$.ops[2].targets").

/// {"dim": n, "re": [...], "im": [...]}, row-major.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path = "$");

/// {"kind", "dims", "power", "payload"} plus "control_map", "label" and
/// "branch_words" when present.
Json to_json(const GateRef& g);
GateRef gate_from_json(const Json& j, const std::string& path = "$");

/// {"qudits": [{"id", "dim"}], "ops": [{"gate", "targets"} | {"measure"}]}.
Json to_json(const Circuit& c);
Circuit circuit_from_json(const Json& j);

/// {"d", "lambda", "x", "z"}.
Json to_json(const PauliProduct& p);
PauliProduct pauli_from_json(const Json& j, const std::string& path = "$");

/// {"shots", "seed", "rng", "measured", "counts": {"0,1": n}}.
Json to_json(const CountsResult& c);

/// {"dims", "dim", "re", "im"}.
Json to_json(const StateVector& s);

Json to_json(const CompileReport& r);
std::string csv_header();
std::string csv_row(const CompileReport& r, int trial);

/// Parses text, reporting syntax errors with line and column.
Json parse_json(const std::string& text, const std::string& source);
Json read_json_file(const std::string& path);
/// Two-space indented output with a trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace qudcomp
