// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

#include "ragkit/errors.hpp"

namespace ragkit {

struct RetryPolicy {
  int max_retries = 2;
  int backoff_ms = 500;  // doubled after every failed attempt
};

// Calls fn() until it succeeds, retrying TransportError (when retryable) and
// TimeoutError at most policy.max_retries times. AuthError and every other
// exception propagate immediately. `attempts`, when given, receives the
// number of calls made.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn, int* attempts = nullptr) -> decltype(fn()) {
  int made = 0;
  std::int64_t delay = policy.backoff_ms;
  while (true) {
    ++made;
    if (attempts) *attempts = made;
    try {
      return fn();
    } catch (const AuthError&) {
      throw;
    } catch (const TransportError& e) {
      if (!e.retryable() || made > policy.max_retries) throw;
    } catch (const TimeoutError&) {
      if (made > policy.max_retries) throw;
    }
    if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    delay *= 2;
  }
}

}  // namespace ragkit
