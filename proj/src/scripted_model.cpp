// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/scripted_model.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "json_util.hpp"

namespace vgs {

ScriptedModel::ScriptedModel(Vocab vocab, const std::vector<ScriptedContext>& contexts)
    : vocab_(std::move(vocab)) {
  for (const auto& ctx : contexts) {
    if (ctx.probs.size() != vocab_.size()) {
      throw InvalidInput("scripted context for '" + ctx.image_id + "' has " +
                         std::to_string(ctx.probs.size()) + " probs, vocab has " +
                         std::to_string(vocab_.size()));
    }
    for (TokenId t : ctx.prefix) {
      if (!vocab_.contains(t)) throw InvalidInput("scripted prefix token outside vocabulary");
    }
    if (!table_.emplace(Key{ctx.image_id, ctx.distorted, ctx.prefix}, ctx.probs).second) {
      throw InvalidInput("duplicate scripted context for '" + ctx.image_id + "' " +
                         prefix_to_string(ctx.prefix));
    }
  }
}

ScriptedModel ScriptedModel::parse(std::string_view json_text) {
  try {
    const auto doc = nlohmann::json::parse(json_text);
    Vocab vocab = detail::vocab_from_json(doc.at("vocab"));
    std::vector<ScriptedContext> contexts;
    for (const auto& c : doc.at("contexts")) {
      ScriptedContext ctx;
      ctx.image_id = c.at("image_id").get<std::string>();
      ctx.prefix = c.at("prefix").get<Prefix>();
      const std::string view = c.value("view", std::string("clean"));
      if (view != "clean" && view != "distorted") throw ConfigError("unknown scripted view '" + view + "'");
      ctx.distorted = view == "distorted";
      ctx.probs = ProbDist(detail::vector_from_json(c.at("probs")));
      contexts.push_back(std::move(ctx));
    }
    return ScriptedModel(std::move(vocab), contexts);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scripted model table: ") + e.what());
  }
}

ScriptedModel ScriptedModel::load(const std::filesystem::path& path) {
  return parse(detail::read_text_file(path));
}

ProbDist ScriptedModel::distribution(const Image& image, const Query&, const Prefix& prefix) const {
  if (image.distorted()) {
    if (auto it = table_.find(Key{image.id(), true, prefix}); it != table_.end()) return it->second;
  }
  if (auto it = table_.find(Key{image.id(), false, prefix}); it != table_.end()) return it->second;
  throw UnknownContext("no scripted distribution for image '" + image.id() + "' prefix " +
                       prefix_to_string(prefix));
}

}  // namespace vgs
