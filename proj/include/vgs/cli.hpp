// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace vgs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitTooManyFailures = 3;

// Entry point of the vgs-decode tool. Returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace vgs
