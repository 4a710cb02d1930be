// Copyright 2026 Earlybird Contributors
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

#ifndef EARLYBIRD_ERROR_HPP
#define EARLYBIRD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace earlybird {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file. line is 1-based; 0 when not attributable to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// An operation was called outside its documented domain (sample size,
// parameter range, unvalidated dataset).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Zero-variance input; normality is undefined.
class DegenerateSampleError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace earlybird

#endif  // EARLYBIRD_ERROR_HPP
