// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vgs/model.hpp"

namespace vgs {

/// Grounded/prior mixture model.
///
///   P(. | V, y) = (1 - g(e)) * prior(. | y) + g(e) * visual(. | V_ref, y)
///   g(e)        = g0 * exp(-decay * e),  e = noise_energy(V_ref, V)
///
/// The visual row is keyed by the clean reference image, so distortion only
/// enters through the grounding coefficient.
struct SyntheticModelSpec {
  struct PriorRow {
    std::optional<std::string> query;  // nullopt matches any query
    Prefix prefix;
    ProbDist probs;
  };
  struct VisualRow {
    std::string image_id;
    std::optional<Prefix> prefix;  // nullopt is the image's default row
    ProbDist probs;
  };

  Vocab vocab;
  std::vector<PriorRow> prior;
  std::vector<VisualRow> visual;
  double g0 = 1.0;
  double decay = 0.0;

  void validate() const;
  double grounding(double energy) const;

  static SyntheticModelSpec parse(std::string_view json_text);
  static SyntheticModelSpec load(const std::filesystem::path& path);
  std::string to_json() const;
};

ProbDist grounded_mixture(const ProbDist& prior, const ProbDist& visual, double grounding);

// Reference implementation over the raw spec tables (linear lookup).
ProbDist synthetic_distribution(const SyntheticModelSpec& spec, const Image& image,
                                const Image& reference, const Prefix& prefix,
                                const std::string& query = {});

class SyntheticModel final : public ModelProvider {
 public:
  explicit SyntheticModel(SyntheticModelSpec spec);

  // Registers the clean image that `image.id()` refers to. Thread-safe.
  void add_reference(const Image& clean);
  bool has_reference(const std::string& image_id) const;

  Capability capability() const override { return Capability::kDense; }
  const Vocab& vocab() const override { return spec_.vocab; }
  ProbDist distribution(const Image& image, const Query& query, const Prefix& prefix) const override;

  const SyntheticModelSpec& spec() const { return spec_; }

 private:
  const ProbDist& prior_row(const std::string& query, const Prefix& prefix) const;
  const ProbDist& visual_row(const std::string& image_id, const Prefix& prefix) const;

  SyntheticModelSpec spec_;
  std::map<std::pair<std::string, Prefix>, std::size_t> prior_by_query_;
  std::map<Prefix, std::size_t> prior_any_query_;
  std::map<std::pair<std::string, Prefix>, std::size_t> visual_by_prefix_;
  std::unordered_map<std::string, std::size_t> visual_default_;

  mutable std::shared_mutex references_mutex_;
  std::unordered_map<std::string, Image> references_;
};

}  // namespace vgs
