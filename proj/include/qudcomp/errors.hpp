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

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qudcomp {

/// Short %g rendering of a real for error messages.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A qudit dimension below 2, or a size that is not a power of the dimension.
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

/// Malformed arguments that do not fit one of the more specific categories.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not meet its own residual contract.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Principal logarithm requested for an eigenphase sitting on the branch cut.
class BranchCut : public Error {
 public:
  using Error::Error;
};

/// A consumed, foreign or measured qudit handle was passed to the builder.
class LinearityViolation : public Error {
 public:
  using Error::Error;
};

class MeasurementError : public Error {
 public:
  using Error::Error;
};

/// Enumeration or table construction would exceed its configured size cap.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

/// Solovay-Kitaev refinement made the approximation worse. Carries the
/// per-depth error trace that was observed before giving up.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Synthesis finished but the result is outside the requested accuracy.
class SynthesisFailure : public Error {
 public:
  using Error::Error;
};

/// Input document (JSON, CLI flags) violates its schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qudcomp
