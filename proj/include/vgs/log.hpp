// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace vgs {

// Routes logging to stderr at the level named by VGS_LOG_LEVEL
// (error, warn, info, debug; default warn).
void init_logging();

}  // namespace vgs
