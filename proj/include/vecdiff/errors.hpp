// Copyright 2026 The vecdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VECDIFF_ERRORS_HPP
#define VECDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vecdiff {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand lengths or matrix shapes do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A result would exceed the entry limit (see kMaxEntries).
class SizeOverflow : public Error {
 public:
  using Error::Error;
};

/// An index or position lies outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Input expected to be permutation invariant is not.
class NonSymmetricInput : public Error {
 public:
  using Error::Error;
};

/// A jet or moment/cumulant set does not supply a requested order.
class MissingOrder : public Error {
 public:
  using Error::Error;
};

class UnknownKind : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain, e.g. a matrix that is not SPD.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed document or flag value.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference estimates at h and h/2 disagree: round-off dominates.
class StepTooSmall : public Error {
 public:
  using Error::Error;
};

}  // namespace vecdiff

#endif  // VECDIFF_ERRORS_HPP
