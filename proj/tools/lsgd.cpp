// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "lsgd/harness/cli.hpp"

int main(int argc, char** argv) { return lsgd::harness::run_cli(argc, argv, std::cout, std::cerr); }
