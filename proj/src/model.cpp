// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/model.hpp"

namespace vgs {

Query::Query(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw InvalidInput("query text is empty");
}

SparseDist ModelProvider::sparse_distribution(const Image& image, const Query& query,
                                              const Prefix& prefix) const {
  const ProbDist dense = distribution(image, query, prefix);
  SparseDist out;
  out.reserve(static_cast<std::size_t>(dense.size()));
  for (Eigen::Index t = 0; t < dense.size(); ++t) out.push_back({static_cast<TokenId>(t), dense[t]});
  return out;
}

ProbDist CountingProvider::distribution(const Image& image, const Query& query,
                                        const Prefix& prefix) const {
  calls_.fetch_add(1);
  return inner_.distribution(image, query, prefix);
}

SparseDist CountingProvider::sparse_distribution(const Image& image, const Query& query,
                                                 const Prefix& prefix) const {
  calls_.fetch_add(1);
  return inner_.sparse_distribution(image, query, prefix);
}

std::string prefix_to_string(const Prefix& prefix) {
  std::string out = "[";
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(prefix[i]);
  }
  return out + "]";
}

}  // namespace vgs
