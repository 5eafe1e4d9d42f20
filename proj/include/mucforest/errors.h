// Copyright 2026 The mucforest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MUCFOREST_ERRORS_H_
#define MUCFOREST_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mucforest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed something that violates an operation's precondition
// (wrong dimension, out-of-range index, bad parameter).
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed model document or dataset file. The message carries the path of
// the offending element, e.g. "trees[0].nodes[3]: unnormalized leaf".
class ParseError : public Error {
 public:
  using Error::Error;
};

// Brute-force cell enumeration would exceed its configured cell budget.
class OracleTooLargeError : public Error {
 public:
  using Error::Error;
};

// Exact Shapley evaluation requested for too many features.
class ModeError : public Error {
 public:
  using Error::Error;
};

// The starting point handed to the boundary search is not adversarial.
class DirectionError : public Error {
 public:
  using Error::Error;
};

// Base for outcomes of the analysis itself rather than bad input. The CLI
// maps these to exit code 2.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// The full assignment is satisfiable, so there is no core to extract. For a
// local explanation this means the sample is misclassified.
class NoCoreError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// Region expansion is blocked: every feature in the current core is immutable
// or already saturated at its bounds.
class NoRegionError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

// No adversarial starting candidate could be found.
class NoCandidateError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

}  // namespace mucforest

#endif  // MUCFOREST_ERRORS_H_
