// Copyright 2026 The Lanekit Authors
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

#ifndef LANEKIT_ERRORS_HPP
#define LANEKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lanekit {

/// Base class for all lanekit failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mapped column is missing or a file does not match its declared layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A cell or token could not be converted; message carries the row index.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its documented domain.
class ParamError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical routine failed to converge or hit a singularity.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A referenced entity (vehicle, frame, feature) does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace lanekit

#endif  // LANEKIT_ERRORS_HPP
