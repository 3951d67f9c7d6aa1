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

#include "qudcomp/tolerances.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "qudcomp/errors.hpp"

namespace qudcomp {

namespace {

double* field(Tolerances& t, const std::string& key) {
  const std::pair<const char*, double Tolerances::*> table[] = {
      {"unitarity", &Tolerances::unitarity},
      {"exp_log", &Tolerances::exp_log},
      {"branch", &Tolerances::branch},
      {"csd", &Tolerances::csd},
      {"lower", &Tolerances::lower},
      {"dedup", &Tolerances::dedup},
      {"clifford", &Tolerances::clifford},
      {"norm", &Tolerances::norm},
      {"retarget", &Tolerances::retarget},
      {"prune", &Tolerances::prune},
      {"balance_threshold", &Tolerances::balance_threshold},
  };
  for (const auto& [name, member] : table) {
    if (key == name) return &(t.*member);
  }
  return nullptr;
}

}  // namespace

void Tolerances::apply_overrides(const std::string& spec) {
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ParseError("tolerance override '" + item + "' is not key=value");
    }
    const std::string key = item.substr(0, eq);
    double* slot = field(*this, key);
    if (slot == nullptr) throw ParseError("unknown tolerance '" + key + "'");
    char* end = nullptr;
    const std::string text = item.substr(eq + 1);
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(value) || value <= 0) {
      throw ParseError("bad value for tolerance '" + key + "': " + text);
    }
    *slot = value;
  }
}

const Tolerances& default_tolerances() {
  static const Tolerances instance = [] {
    Tolerances t;
    if (const char* env = std::getenv("QUDCOMP_TOL")) t.apply_overrides(env);
    return t;
  }();
  return instance;
}

}  // namespace qudcomp
