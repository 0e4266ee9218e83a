// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "vgs/image.hpp"
#include "vgs/prob.hpp"

namespace vgs {

class Query {
 public:
  explicit Query(std::string text);
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

using Prefix = std::vector<TokenId>;

enum class Capability { kDense, kSparseTopK };

/// Conditional next-token distribution source: (image, query, prefix) -> P.
///
/// Implementations must be safe to call concurrently once constructed and
/// must return equal outputs for equal inputs.
class ModelProvider {
 public:
  virtual ~ModelProvider() = default;

  virtual Capability capability() const = 0;
  virtual const Vocab& vocab() const = 0;

  virtual ProbDist distribution(const Image& image, const Query& query, const Prefix& prefix) const = 0;

  // Sparse providers override this; the default lists every dense entry.
  virtual SparseDist sparse_distribution(const Image& image, const Query& query,
                                         const Prefix& prefix) const;
};

// Forwards to another provider and counts calls. Used to audit forward passes.
class CountingProvider final : public ModelProvider {
 public:
  explicit CountingProvider(const ModelProvider& inner) : inner_(inner) {}

  Capability capability() const override { return inner_.capability(); }
  const Vocab& vocab() const override { return inner_.vocab(); }
  ProbDist distribution(const Image& image, const Query& query, const Prefix& prefix) const override;
  SparseDist sparse_distribution(const Image& image, const Query& query,
                                 const Prefix& prefix) const override;

  std::int64_t calls() const { return calls_.load(); }
  void reset() { calls_.store(0); }

 private:
  const ModelProvider& inner_;
  mutable std::atomic<std::int64_t> calls_{0};
};

std::string prefix_to_string(const Prefix& prefix);

}  // namespace vgs
