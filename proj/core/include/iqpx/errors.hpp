// Copyright 2026 The iqpx Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace iqpx {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: wrong sizes, out-of-range parameters, odd qubit counts.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Mathematically undefined input, e.g. log of a zero probability.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Requested problem exceeds the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Solver breakdown or non-finite values during iteration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace iqpx
