/*
 * Copyright 2026 The Ballad Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BALLAD_ERROR_HPP_
#define BALLAD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ballad {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that violates a value constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Dataset too small for the requested operation.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Budget or round configuration that cannot be satisfied.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (mismatched lengths, etc.).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace ballad

#endif  // BALLAD_ERROR_HPP_
