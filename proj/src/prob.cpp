// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/prob.hpp"

#include <unordered_set>

namespace vgs {

Vocab::Vocab(std::vector<std::string> tokens, TokenId eos) : tokens_(std::move(tokens)), eos_(eos) {
  if (tokens_.empty()) throw InvalidInput("vocabulary is empty");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw InvalidInput("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
  if (!contains(eos_)) throw InvalidInput("eos id " + std::to_string(eos_) + " outside vocabulary");
}

Vocab Vocab::placeholder(std::int64_t size, TokenId eos) {
  if (size <= 0) throw InvalidInput("vocabulary size must be positive");
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(size));
  for (std::int64_t i = 0; i < size; ++i) tokens.push_back("<" + std::to_string(i) + ">");
  return Vocab(std::move(tokens), eos);
}

const std::string& Vocab::token(TokenId id) const {
  if (!contains(id)) throw InvalidInput("token id " + std::to_string(id) + " outside vocabulary");
  return tokens_[static_cast<std::size_t>(id)];
}

TokenId Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? TokenId{-1} : it->second;
}

namespace {

void validate_sparse(const SparseDist& sparse, std::int64_t vocab_size) {
  std::unordered_set<TokenId> seen;
  double total = 0.0;
  for (const auto& e : sparse) {
    if (e.token < 0 || e.token >= vocab_size) {
      throw InvalidInput("sparse token id " + std::to_string(e.token) + " outside vocabulary");
    }
    if (!seen.insert(e.token).second) {
      throw InvalidInput("duplicate token id " + std::to_string(e.token) + " in sparse distribution");
    }
    if (!std::isfinite(e.prob) || e.prob < 0.0 || e.prob > 1.0) {
      throw InvalidInput("sparse probability out of [0,1]");
    }
    total += e.prob;
  }
  if (total > 1.0 + kSumTolerance) {
    throw InvalidInput("sparse probabilities sum to " + std::to_string(total) + " > 1");
  }
}

ProbDist densify_validated(const SparseDist& sparse, std::int64_t vocab_size, double tail_floor) {
  LogitVec dense = LogitVec::Zero(vocab_size);
  std::vector<bool> present(static_cast<std::size_t>(vocab_size), false);
  double listed = 0.0;
  for (const auto& e : sparse) {
    dense[e.token] = e.prob;
    present[static_cast<std::size_t>(e.token)] = true;
    listed += e.prob;
  }
  const auto n_absent = vocab_size - static_cast<std::int64_t>(sparse.size());
  if (n_absent > 0) {
    const double residue = std::max(0.0, 1.0 - listed) / static_cast<double>(n_absent);
    const double fill = std::max(residue, tail_floor);
    for (std::int64_t t = 0; t < vocab_size; ++t) {
      if (!present[static_cast<std::size_t>(t)]) dense[t] = fill;
    }
  }
  return normalize(dense);
}

}  // namespace

ProbDist densify(const SparseDist& sparse, std::int64_t vocab_size, double tail_floor) {
  if (vocab_size <= 0) throw InvalidInput("vocabulary size must be positive");
  if (!(tail_floor > 0.0)) throw InvalidInput("tail_floor must be positive");
  validate_sparse(sparse, vocab_size);
  return densify_validated(sparse, vocab_size, tail_floor);
}

std::pair<ProbDist, ProbDist> densify_pair(const SparseDist& a, const SparseDist& b,
                                           std::int64_t vocab_size, double tail_floor) {
  if (vocab_size <= 0) throw InvalidInput("vocabulary size must be positive");
  if (!(tail_floor > 0.0)) throw InvalidInput("tail_floor must be positive");
  validate_sparse(a, vocab_size);
  validate_sparse(b, vocab_size);
  return {densify_validated(a, vocab_size, tail_floor), densify_validated(b, vocab_size, tail_floor)};
}

}  // namespace vgs
