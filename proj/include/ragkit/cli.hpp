// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace ragkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

// Entry point of the `ragkit` command. args[0] is the program name.
int run_app(const std::vector<std::string>& args);
int run_app(int argc, const char* const* argv);

}  // namespace ragkit::cli
