// Copyright 2026 The ragkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ragkit/cli.hpp"

int main(int argc, char** argv) { return ragkit::cli::run_app(argc, argv); }
