// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace covop {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed data or arguments: grid mismatch, too few curves, bad alpha...
class InvalidInput : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Settings that are individually valid but cannot produce a test, e.g. empty
// extremal sets.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace covop
