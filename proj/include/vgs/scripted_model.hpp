// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vgs/model.hpp"

namespace vgs {

struct ScriptedContext {
  std::string image_id;
  Prefix prefix;
  bool distorted = false;
  ProbDist probs;
};

/// Table-driven provider for exact tests.
///
/// Lookups key on (image id, view, prefix). A distorted-view lookup with no
/// distorted entry falls back to the clean entry, i.e. that context does not
/// depend on the image.
class ScriptedModel final : public ModelProvider {
 public:
  ScriptedModel(Vocab vocab, const std::vector<ScriptedContext>& contexts);

  // {vocab: {tokens, eos_id}, contexts: [{image_id, prefix, probs, view?}]}
  static ScriptedModel parse(std::string_view json_text);
  static ScriptedModel load(const std::filesystem::path& path);

  Capability capability() const override { return Capability::kDense; }
  const Vocab& vocab() const override { return vocab_; }
  ProbDist distribution(const Image& image, const Query& query, const Prefix& prefix) const override;

  std::size_t context_count() const { return table_.size(); }

 private:
  using Key = std::tuple<std::string, bool, Prefix>;
  Vocab vocab_;
  std::map<Key, ProbDist> table_;
};

}  // namespace vgs
