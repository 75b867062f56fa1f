// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ragkit::detail {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResult {
  int status = 0;
  std::string body;
};

// Reads an API key from the named environment variable; AuthError if unset
// or empty.
std::string require_env(const std::string& var);

// Both throw TimeoutError on read/connect timeouts, AuthError on 401/403,
// TransportError otherwise (retryable for 408, 429 and 5xx).
HttpResult http_post_json(const std::string& url, const Headers& headers, const std::string& body,
                          int timeout_ms);
HttpResult http_get(const std::string& url, const Headers& headers, int timeout_ms);

std::string url_encode(const std::string& s);

}  // namespace ragkit::detail
