// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/synthetic_model.hpp"

#include <cmath>
#include <mutex>

#include "json_util.hpp"

namespace vgs {

void SyntheticModelSpec::validate() const {
  if (!std::isfinite(g0) || g0 < 0.0 || g0 > 1.0) throw ConfigError("synthetic g0 must lie in [0,1]");
  if (!std::isfinite(decay) || decay < 0.0) throw ConfigError("synthetic decay must be >= 0");
  for (const auto& row : prior) {
    if (row.probs.size() != vocab.size()) throw ConfigError("prior row length differs from vocab size");
  }
  for (const auto& row : visual) {
    if (row.probs.size() != vocab.size()) throw ConfigError("visual row length differs from vocab size");
  }
}

double SyntheticModelSpec::grounding(double energy) const {
  if (energy < 0.0) throw InvalidInput("noise energy must be >= 0");
  return g0 * std::exp(-decay * energy);
}

SyntheticModelSpec SyntheticModelSpec::parse(std::string_view json_text) {
  try {
    const auto doc = nlohmann::json::parse(json_text);
    SyntheticModelSpec spec;
    spec.vocab = detail::vocab_from_json(doc.at("vocab"));
    spec.g0 = doc.at("g0").get<double>();
    spec.decay = doc.at("decay").get<double>();
    for (const auto& r : doc.at("prior")) {
      PriorRow row;
      if (r.contains("query")) row.query = r.at("query").get<std::string>();
      row.prefix = r.at("prefix").get<Prefix>();
      row.probs = ProbDist(detail::vector_from_json(r.at("probs")));
      spec.prior.push_back(std::move(row));
    }
    for (const auto& r : doc.at("visual")) {
      VisualRow row;
      row.image_id = r.at("image_id").get<std::string>();
      if (r.contains("prefix") && !r.at("prefix").is_null()) row.prefix = r.at("prefix").get<Prefix>();
      row.probs = ProbDist(detail::vector_from_json(r.at("probs")));
      spec.visual.push_back(std::move(row));
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed synthetic model spec: ") + e.what());
  }
}

SyntheticModelSpec SyntheticModelSpec::load(const std::filesystem::path& path) {
  return parse(detail::read_text_file(path));
}

std::string SyntheticModelSpec::to_json() const {
  auto probs_json = [](const ProbDist& p) {
    return std::vector<double>(p.probs().data(), p.probs().data() + p.size());
  };
  nlohmann::json doc;
  doc["vocab"] = detail::vocab_to_json(vocab);
  doc["g0"] = g0;
  doc["decay"] = decay;
  doc["prior"] = nlohmann::json::array();
  for (const auto& row : prior) {
    nlohmann::json r{{"prefix", row.prefix}, {"probs", probs_json(row.probs)}};
    if (row.query) r["query"] = *row.query;
    doc["prior"].push_back(std::move(r));
  }
  doc["visual"] = nlohmann::json::array();
  for (const auto& row : visual) {
    nlohmann::json r{{"image_id", row.image_id}, {"probs", probs_json(row.probs)}};
    if (row.prefix) r["prefix"] = *row.prefix;
    doc["visual"].push_back(std::move(r));
  }
  return doc.dump(1);
}

ProbDist grounded_mixture(const ProbDist& prior, const ProbDist& visual, double grounding) {
  if (prior.size() != visual.size()) throw InvalidInput("prior and visual rows differ in length");
  if (grounding == 0.0) return prior;
  if (grounding == 1.0) return visual;
  return normalize((1.0 - grounding) * prior.probs() + grounding * visual.probs());
}

ProbDist synthetic_distribution(const SyntheticModelSpec& spec, const Image& image,
                                const Image& reference, const Prefix& prefix,
                                const std::string& query) {
  spec.validate();
  const ProbDist* prior = nullptr;
  for (const auto& row : spec.prior) {
    if (row.prefix != prefix) continue;
    if (row.query && *row.query == query) { prior = &row.probs; break; }
    if (!row.query && prior == nullptr) prior = &row.probs;
  }
  if (prior == nullptr) throw UnknownContext("prefix " + prefix_to_string(prefix) + " missing from prior table");

  const ProbDist* visual = nullptr;
  for (const auto& row : spec.visual) {
    if (row.image_id != reference.id()) continue;
    if (row.prefix && *row.prefix == prefix) { visual = &row.probs; break; }
    if (!row.prefix && visual == nullptr) visual = &row.probs;
  }
  if (visual == nullptr) throw UnknownContext("no visual row for image '" + reference.id() + "'");

  return grounded_mixture(*prior, *visual, spec.grounding(noise_energy(reference, image)));
}

SyntheticModel::SyntheticModel(SyntheticModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  for (std::size_t i = 0; i < spec_.prior.size(); ++i) {
    const auto& row = spec_.prior[i];
    const bool fresh = row.query ? prior_by_query_.emplace(std::pair{*row.query, row.prefix}, i).second
                                 : prior_any_query_.emplace(row.prefix, i).second;
    if (!fresh) throw ConfigError("duplicate prior row for prefix " + prefix_to_string(row.prefix));
  }
  for (std::size_t i = 0; i < spec_.visual.size(); ++i) {
    const auto& row = spec_.visual[i];
    const bool fresh = row.prefix ? visual_by_prefix_.emplace(std::pair{row.image_id, *row.prefix}, i).second
                                  : visual_default_.emplace(row.image_id, i).second;
    if (!fresh) throw ConfigError("duplicate visual row for image '" + row.image_id + "'");
  }
}

void SyntheticModel::add_reference(const Image& clean) {
  std::unique_lock lock(references_mutex_);
  references_.insert_or_assign(clean.id(), clean);
}

bool SyntheticModel::has_reference(const std::string& image_id) const {
  std::shared_lock lock(references_mutex_);
  return references_.contains(image_id);
}

const ProbDist& SyntheticModel::prior_row(const std::string& query, const Prefix& prefix) const {
  if (auto it = prior_by_query_.find({query, prefix}); it != prior_by_query_.end()) {
    return spec_.prior[it->second].probs;
  }
  if (auto it = prior_any_query_.find(prefix); it != prior_any_query_.end()) {
    return spec_.prior[it->second].probs;
  }
  throw UnknownContext("prefix " + prefix_to_string(prefix) + " missing from prior table");
}

const ProbDist& SyntheticModel::visual_row(const std::string& image_id, const Prefix& prefix) const {
  if (auto it = visual_by_prefix_.find({image_id, prefix}); it != visual_by_prefix_.end()) {
    return spec_.visual[it->second].probs;
  }
  if (auto it = visual_default_.find(image_id); it != visual_default_.end()) {
    return spec_.visual[it->second].probs;
  }
  throw UnknownContext("no visual row for image '" + image_id + "'");
}

ProbDist SyntheticModel::distribution(const Image& image, const Query& query, const Prefix& prefix) const {
  double energy = 0.0;
  {
    std::shared_lock lock(references_mutex_);
    auto it = references_.find(image.id());
    if (it == references_.end()) throw UnknownContext("no clean reference registered for image '" + image.id() + "'");
    energy = noise_energy(it->second, image);
  }
  return grounded_mixture(prior_row(query.text(), prefix), visual_row(image.id(), prefix),
                          spec_.grounding(energy));
}

}  // namespace vgs
