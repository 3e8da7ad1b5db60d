// Copyright 2026 The tgrl Authors.
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

#ifndef TGRL_ERRORS_H_
#define TGRL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tgrl {

// Base for every error raised by the library. The CLI prints what() as its
// one-line diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// NaN or otherwise unusable floating-point input.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// File content is well-formed but inconsistent with the expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A record violates a domain invariant (e.g. gt out of [0,1]).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// tIoU denominator is zero.
class DegenerateIntervalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tgrl

#endif  // TGRL_ERRORS_H_
