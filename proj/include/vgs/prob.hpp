// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vgs/errors.hpp"

namespace vgs {

// Sum-to-one tolerance shared by every distribution in the library.
inline constexpr double kSumTolerance = 1e-9;

using TokenId = std::int64_t;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using LogitVec = Vector<double>;

template <typename Scalar>
constexpr Scalar sum_tolerance() {
  // float cannot resolve 1e-9; fall back to a few ulps of accumulated error.
  return std::max<Scalar>(static_cast<Scalar>(kSumTolerance),
                          Scalar(64) * std::numeric_limits<Scalar>::epsilon());
}

class Vocab {
 public:
  Vocab() = default;
  Vocab(std::vector<std::string> tokens, TokenId eos);

  // Tokens rendered as "<id>"; used when a backend exposes no strings.
  static Vocab placeholder(std::int64_t size, TokenId eos);

  std::int64_t size() const { return static_cast<std::int64_t>(tokens_.size()); }
  TokenId eos() const { return eos_; }
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  // Returns -1 when absent.
  TokenId find(std::string_view token) const;
  bool contains(TokenId id) const { return id >= 0 && id < size(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId eos_ = 0;
};

/// Dense probability vector over a vocabulary.
///
/// Construction validates non-negativity and sum-to-one; instances are
/// immutable afterwards.
template <typename Scalar = double>
class BasicProbDist {
 public:
  using VectorType = Vector<Scalar>;

  BasicProbDist() = default;

  explicit BasicProbDist(VectorType probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw InvalidInput("probability vector is empty");
    if (!probs_.allFinite()) throw InvalidInput("probability vector has non-finite entries");
    if ((probs_.array() < Scalar(0)).any()) throw InvalidInput("probability vector has negative entries");
    const Scalar total = probs_.sum();
    if (std::abs(total - Scalar(1)) > sum_tolerance<Scalar>()) {
      throw InvalidInput("probability vector sums to " + std::to_string(static_cast<double>(total)));
    }
  }

  const VectorType& probs() const { return probs_; }
  Eigen::Index size() const { return probs_.size(); }
  Scalar operator[](Eigen::Index t) const { return probs_[t]; }

  // Lowest id wins ties.
  TokenId argmax() const {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probs_.size(); ++i) {
      if (probs_[i] > probs_[best]) best = i;
    }
    return static_cast<TokenId>(best);
  }

  // Position of `t` in the argmax order (0 = argmax), same tie rule.
  std::int64_t rank_of(TokenId t) const {
    std::int64_t rank = 0;
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
      if (probs_[i] > probs_[t] || (probs_[i] == probs_[t] && i < t)) ++rank;
    }
    return rank;
  }

  friend bool operator==(const BasicProbDist& a, const BasicProbDist& b) {
    return a.probs_.size() == b.probs_.size() && a.probs_ == b.probs_;
  }

 private:
  VectorType probs_;
};

using ProbDist = BasicProbDist<double>;

template <typename Derived>
BasicProbDist<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  if (logits.size() == 0) throw InvalidInput("softmax of empty logit vector");
  if (!logits.allFinite()) throw InvalidInput("softmax of non-finite logits");
  Vector<Scalar> shifted = (logits.array() - logits.maxCoeff()).exp().matrix();
  shifted /= shifted.sum();
  return BasicProbDist<Scalar>(std::move(shifted));
}

template <typename Derived>
BasicProbDist<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  if (weights.size() == 0) throw InvalidInput("normalize of empty vector");
  if (!weights.allFinite()) throw InvalidInput("normalize of non-finite weights");
  if ((weights.array() < Scalar(0)).any()) throw InvalidInput("normalize of negative weights");
  const Scalar total = weights.sum();
  if (!(total > Scalar(0))) throw DegenerateDistribution("cannot normalize an all-zero vector");
  return BasicProbDist<Scalar>(Vector<Scalar>(weights / total));
}

struct SparseEntry {
  TokenId token = 0;
  double prob = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Top-k (token, probability) pairs; mass outside the listed tokens is implicit.
using SparseDist = std::vector<SparseEntry>;

inline constexpr double kDefaultTailFloor = 1e-12;

/// Expands two sparse distributions onto the full vocabulary so they share a
/// support. Each token absent from an input receives that input's leftover
/// mass spread uniformly, floored at `tail_floor`; both outputs are then
/// renormalized.
std::pair<ProbDist, ProbDist> densify_pair(const SparseDist& a, const SparseDist& b,
                                           std::int64_t vocab_size,
                                           double tail_floor = kDefaultTailFloor);

// Single-sided densification with the same residue rule.
ProbDist densify(const SparseDist& sparse, std::int64_t vocab_size,
                 double tail_floor = kDefaultTailFloor);

}  // namespace vgs
