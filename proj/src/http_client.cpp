// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "http_client.hpp"

#include <cstdio>
#include <cstdlib>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "ragkit/errors.hpp"

namespace ragkit::detail {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed URL: " + url, false);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

httplib::Headers to_headers(const Headers& in) {
  httplib::Headers out;
  for (const auto& [k, v] : in) out.emplace(k, v);
  return out;
}

void configure(httplib::Client& cli, int timeout_ms) {
  auto sec = timeout_ms / 1000;
  auto usec = (timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  cli.set_follow_location(true);
}

HttpResult finish(const httplib::Result& res, const std::string& url) {
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write ||
        err == httplib::Error::ConnectionTimeout) {
      throw TimeoutError("timed out talking to " + url);
    }
    throw TransportError("request to " + url + " failed: " + httplib::to_string(err));
  }
  int status = res->status;
  if (status == 401 || status == 403) {
    throw AuthError("authentication rejected by " + url + " (HTTP " + std::to_string(status) + ")");
  }
  if (status < 200 || status >= 300) {
    bool retryable = status == 408 || status == 429 || status >= 500;
    throw TransportError("HTTP " + std::to_string(status) + " from " + url, retryable);
  }
  return {status, res->body};
}

}  // namespace

std::string require_env(const std::string& var) {
  if (var.empty()) throw AuthError("no API key environment variable configured");
  const char* v = std::getenv(var.c_str());
  if (!v || !*v) throw AuthError("environment variable " + var + " is not set");
  return v;
}

HttpResult http_post_json(const std::string& url, const Headers& headers, const std::string& body,
                          int timeout_ms) {
  auto parts = split_url(url);
  httplib::Client cli(parts.origin);
  configure(cli, timeout_ms);
  auto res = cli.Post(parts.path, to_headers(headers), body, "application/json");
  return finish(res, url);
}

HttpResult http_get(const std::string& url, const Headers& headers, int timeout_ms) {
  auto parts = split_url(url);
  httplib::Client cli(parts.origin);
  configure(cli, timeout_ms);
  auto res = cli.Get(parts.path, to_headers(headers));
  return finish(res, url);
}

std::string url_encode(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out.append(buf);
    }
  }
  return out;
}

}  // namespace ragkit::detail
