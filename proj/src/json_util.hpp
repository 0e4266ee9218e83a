// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vgs/errors.hpp"
#include "vgs/prob.hpp"

namespace vgs::detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LogitVec vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const LogitVec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Either {tokens: [...], eos_id} or {size, eos_id} for placeholder strings.
inline Vocab vocab_from_json(const nlohmann::json& j) {
  const auto eos = j.at("eos_id").get<TokenId>();
  if (j.contains("tokens")) return Vocab(j.at("tokens").get<std::vector<std::string>>(), eos);
  return Vocab::placeholder(j.at("size").get<std::int64_t>(), eos);
}

inline nlohmann::json vocab_to_json(const Vocab& vocab) {
  return {{"tokens", vocab.tokens()}, {"eos_id", vocab.eos()}};
}

}  // namespace vgs::detail
