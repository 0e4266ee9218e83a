// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/cli.hpp"

int main(int argc, char** argv) { return vgs::cli_main(argc, argv); }
