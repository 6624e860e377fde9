// Copyright 2026 The CodeConcept Authors
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

#ifndef CODECONCEPT_ERRORS_H_
#define CODECONCEPT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace codeconcept {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: unreadable corpora, corrupt files, invariant violations.
// The CLI maps these to exit status 1.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid flags or configuration. The CLI maps these to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Source text that does not parse under its grammar.
class SyntaxError : public DataError {
 public:
  using DataError::DataError;
};

// Activation / attribution / cluster file that violates its format.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// LLM response that is not valid JSON.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

// LLM response JSON that lacks a field or has out-of-range values.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Operation requested for a language it does not support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Network failure talking to the LLM endpoint.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Non-2xx response from the LLM endpoint after retries.
class ApiError : public Error {
 public:
  ApiError(int status, const std::string& message)
      : Error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace codeconcept

#endif  // CODECONCEPT_ERRORS_H_
