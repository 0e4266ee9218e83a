// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace vgs {

void init_logging() {
  static auto logger = [] {
    auto l = spdlog::stderr_color_mt("vgs");
    spdlog::set_default_logger(l);
    return l;
  }();
  const char* env = std::getenv("VGS_LOG_LEVEL");
  const std::string level = env ? env : "warn";
  if (level == "error") logger->set_level(spdlog::level::err);
  else if (level == "info") logger->set_level(spdlog::level::info);
  else if (level == "debug") logger->set_level(spdlog::level::debug);
  else logger->set_level(spdlog::level::warn);
}

}  // namespace vgs
