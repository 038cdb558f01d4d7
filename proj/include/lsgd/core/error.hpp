// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every lsgd module.

#pragma once

#include <stdexcept>
#include <string>

namespace lsgd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model / experiment / topology configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-range input data (token ids, files).
class DataError : public Error {
 public:
  using Error::Error;
};

// Two parameter-shaped vectors disagree in layout.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A scalar argument lies outside the accepted range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Non-positive values where logarithms are required.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Degenerate regression design (no spread in the regressor).
class RankError : public Error {
 public:
  using Error::Error;
};

// Regressor outside the validity range of a fitted law.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Replica state diverged from the layout of the global state.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsgd
