// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vgs/eval.hpp"
#include "vgs/image.hpp"
#include "vgs/synthetic_model.hpp"

namespace vgs {

// Hallucination-prone synthetic VQA set. Each episode pits one answer the
// language prior favours against the answer the image supports.
struct BenchmarkOptions {
  int episodes = 500;
  std::uint64_t seed = 2026;
  double g0 = 0.5;
  double decay = 15.0;
  double prior_low = 0.7, prior_high = 0.9;    // prior mass on the prior-driven token
  double visual_low = 0.6, visual_high = 0.95;  // visual mass on the grounded token
  int image_size = 32;
};

struct BenchmarkEpisode {
  TokenId grounded = 0;
  TokenId prior_driven = 0;
};

struct SyntheticBenchmark {
  SyntheticModelSpec spec;
  std::vector<VqaItem> items;
  std::vector<Image> images;  // images[i] belongs to items[i]
  std::vector<BenchmarkEpisode> episodes;
};

SyntheticBenchmark make_hallucination_benchmark(const BenchmarkOptions& options = {});

// Writes dataset.jsonl, images/*.f32, provider.json and config.json into `dir`.
void write_benchmark(const SyntheticBenchmark& bench, const std::filesystem::path& dir);

}  // namespace vgs
