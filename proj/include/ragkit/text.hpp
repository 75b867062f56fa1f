// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ragkit::text {

std::string trim(std::string_view s);

// Trims and replaces every run of whitespace with a single space.
std::string collapse_whitespace(std::string_view s);

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

// Lowercase word tokens: maximal runs of ASCII alphanumerics or non-ASCII
// bytes (so UTF-8 words stay whole).
std::vector<std::string> word_tokens(std::string_view s);

// Splits on a literal delimiter. Never drops segments.
std::vector<std::string> split(std::string_view s, std::string_view delim);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool contains_ci(std::string_view haystack, std::string_view needle);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex16(std::uint64_t v);

// Stable identity of a prompt: FNV-1a over the whitespace-collapsed text,
// rendered as 16 lowercase hex digits.
std::string prompt_fingerprint(std::string_view prompt);

}  // namespace ragkit::text
