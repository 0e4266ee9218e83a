// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "vgs/model.hpp"

namespace vgs {

struct RemoteOptions {
  std::chrono::milliseconds timeout{30000};
  // Extra attempts after a transport failure or timeout.
  int transport_retries = 1;
};

/// One request against POST {endpoint}/v1/distribution.
///
/// Request:  {image_b64, query, prefix, top_k}
/// Response: {vocab_size, eos_id, entries: [[id, prob], ...]}
///
/// Returns at most `top_k` entries sorted by descending probability. Throws
/// BackendError on transport failure (after retrying), timeout, HTTP status
/// >= 400, or schema violations (including probabilities summing above 1).
SparseDist remote_distribution(const std::string& endpoint, const Image& image, const Query& query,
                               const Prefix& prefix, int top_k, const RemoteOptions& options = {},
                               const Vocab* expected_vocab = nullptr);

struct RemoteConfig {
  std::string endpoint;
  int top_k = 50;
  RemoteOptions options;
  int max_in_flight = 4;
  double tail_floor = kDefaultTailFloor;
};

class RemoteModel final : public ModelProvider {
 public:
  RemoteModel(RemoteConfig config, Vocab vocab);

  Capability capability() const override { return Capability::kSparseTopK; }
  const Vocab& vocab() const override { return vocab_; }
  ProbDist distribution(const Image& image, const Query& query, const Prefix& prefix) const override;
  SparseDist sparse_distribution(const Image& image, const Query& query,
                                 const Prefix& prefix) const override;

  const RemoteConfig& config() const { return config_; }

 private:
  RemoteConfig config_;
  Vocab vocab_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace vgs
