// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vgs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: empty/non-finite vectors, length mismatches, duplicate ids.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A weight vector with no positive mass was handed to normalization.
class DegenerateDistribution : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A provider was asked about a (image, prefix) context it has no table for.
class UnknownContext : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  enum class Kind { kTransport, kTimeout, kHttpStatus, kSchema };

  BackendError(Kind kind, const std::string& what, int attempts, bool retryable,
               int http_status = 0)
      : Error(what),
        kind_(kind),
        attempts_(attempts),
        retryable_(retryable),
        http_status_(http_status) {}

  Kind kind() const { return kind_; }
  int attempts() const { return attempts_; }
  bool retryable() const { return retryable_; }
  int http_status() const { return http_status_; }

 private:
  Kind kind_;
  int attempts_;
  bool retryable_;
  int http_status_;
};

}  // namespace vgs
