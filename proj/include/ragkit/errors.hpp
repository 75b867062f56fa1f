// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ragkit {

class RagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing credentials. Never retried.
class AuthError : public RagError {
 public:
  using RagError::RagError;
};

// Network or server failure. `retryable` is false for client-side request
// errors (4xx other than 408/429) which will not get better on retry.
class TransportError : public RagError {
 public:
  explicit TransportError(const std::string& what, bool retryable = true)
      : RagError(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class TimeoutError : public RagError {
 public:
  using RagError::RagError;
};

class SearchTransportError : public TransportError {
 public:
  using TransportError::TransportError;
};

// Malformed input record. `line` is 1-based, 0 when not line-oriented.
class FormatError : public RagError {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : RagError(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public RagError {
 public:
  using RagError::RagError;
};

class ConfigError : public RagError {
 public:
  using RagError::RagError;
};

class EmptyTextError : public RagError {
 public:
  using RagError::RagError;
};

class DimensionMismatch : public RagError {
 public:
  using RagError::RagError;
};

class FetchError : public RagError {
 public:
  using RagError::RagError;
};

class EmptyPage : public RagError {
 public:
  using RagError::RagError;
};

class EmptyField : public RagError {
 public:
  using RagError::RagError;
};

class UnknownQuestionId : public RagError {
 public:
  using RagError::RagError;
};

}  // namespace ragkit
