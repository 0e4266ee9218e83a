// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vgs/image.hpp"
#include "vgs/model.hpp"
#include "vgs/prob.hpp"

namespace vgs {

struct VgsParams {
  double alpha = 1.0;
  double delta = 0.01;

  void validate() const;
};

/// Per-token visual grounding scores, each in [-1, +1].
template <typename Scalar = double>
class BasicVgsVec {
 public:
  using VectorType = Vector<Scalar>;

  BasicVgsVec() = default;
  explicit BasicVgsVec(VectorType scores) : scores_(std::move(scores)) {
    if (!scores_.allFinite() || (scores_.array().abs() > Scalar(1)).any()) {
      throw InvalidInput("grounding scores must lie in [-1, 1]");
    }
  }

  const VectorType& scores() const { return scores_; }
  Eigen::Index size() const { return scores_.size(); }
  Scalar operator[](Eigen::Index t) const { return scores_[t]; }

 private:
  VectorType scores_;
};

using VgsVec = BasicVgsVec<double>;

/// (p_orig - p_dist) / (p_orig + p_dist) per token; 0/0 is defined as 0.
template <typename Scalar>
BasicVgsVec<Scalar> compute_vgs(const BasicProbDist<Scalar>& p_orig, const BasicProbDist<Scalar>& p_dist) {
  if (p_orig.size() != p_dist.size()) throw InvalidInput("compute_vgs: distribution lengths differ");
  const auto num = (p_orig.probs() - p_dist.probs()).array();
  const auto den = (p_orig.probs() + p_dist.probs()).array();
  Vector<Scalar> scores = (den > Scalar(0)).select(num / den, Scalar(0)).matrix();
  // Rounding can push |score| a hair past 1 when one side is denormal.
  scores = scores.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
  return BasicVgsVec<Scalar>(std::move(scores));
}

// max(1 + alpha * vgs, delta), elementwise.
template <typename Scalar>
Vector<Scalar> reweight_factors(const BasicVgsVec<Scalar>& vgs, const VgsParams& params) {
  return (Scalar(1) + static_cast<Scalar>(params.alpha) * vgs.scores().array())
      .max(static_cast<Scalar>(params.delta))
      .matrix();
}

/// P_final ∝ P_orig * max(1 + alpha * VGS, delta), renormalized.
template <typename Scalar>
BasicProbDist<Scalar> vgs_reweight(const BasicProbDist<Scalar>& p_orig, const BasicVgsVec<Scalar>& vgs,
                                   const VgsParams& params) {
  params.validate();
  if (p_orig.size() != vgs.size()) throw InvalidInput("vgs_reweight: length mismatch");
  if (params.alpha == 0.0) return p_orig;
  const Vector<Scalar> weighted = p_orig.probs().cwiseProduct(reweight_factors(vgs, params));
  // delta > 0 and a valid p_orig keep this strictly positive somewhere.
  return normalize(weighted);
}

inline constexpr double kLogZeroSentinel = -1e9;

/// Subtractive log-space contrast with an adaptive plausibility cutoff.
///
/// Candidates are tokens with p_orig >= beta * max(p_orig). Over candidates,
/// score = (1 + alpha) log p_orig - alpha log p_dist, with log 0 replaced by
/// kLogZeroSentinel; the result is a softmax over candidates and zero elsewhere.
template <typename Scalar>
BasicProbDist<Scalar> vcd_adjust(const BasicProbDist<Scalar>& p_orig, const BasicProbDist<Scalar>& p_dist,
                                 double alpha, double beta) {
  if (p_orig.size() != p_dist.size()) throw InvalidInput("vcd_adjust: distribution lengths differ");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("vcd alpha must be >= 0");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidInput("vcd beta must lie in [0,1]");

  const auto safe_log = [](Scalar p) { return p > Scalar(0) ? std::log(p) : static_cast<Scalar>(kLogZeroSentinel); };
  const Scalar cutoff = static_cast<Scalar>(beta) * p_orig.probs().maxCoeff();
  const Eigen::Index n = p_orig.size();

  Vector<Scalar> scores(n);
  std::vector<bool> candidate(static_cast<std::size_t>(n));
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    candidate[static_cast<std::size_t>(t)] = p_orig[t] >= cutoff;
    if (!candidate[static_cast<std::size_t>(t)]) continue;
    scores[t] = (Scalar(1) + static_cast<Scalar>(alpha)) * safe_log(p_orig[t]) -
                static_cast<Scalar>(alpha) * safe_log(p_dist[t]);
    best = std::max(best, scores[t]);
  }
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (candidate[static_cast<std::size_t>(t)]) out[t] = std::exp(scores[t] - best);
  }
  return normalize(out);
}

enum class Strategy { kGreedy, kVcd, kVgs };

std::string to_string(Strategy strategy);
Strategy strategy_from_string(const std::string& name);

struct DecodeConfig {
  Strategy strategy = Strategy::kVgs;
  VgsParams vgs;
  double vcd_alpha = 1.0;
  double vcd_beta = 0.1;
  // noise.seed is ignored; the distortion stream is seeded from `seed`.
  NoiseParams noise;
  int max_len = 64;
  std::uint64_t seed = 0;
  double tail_floor = kDefaultTailFloor;
  // Issue the clean and distorted passes concurrently.
  bool concurrent_passes = false;

  void validate() const;
};

struct DecodeStep {
  int step = 0;
  TokenId token = 0;
  double p_orig = 0.0;
  std::optional<double> p_dist;
  std::optional<double> vgs;
  double factor = 1.0;
  double p_final = 0.0;
  // Rank of the chosen token under P_orig; 0 means greedy would agree.
  std::int64_t orig_rank = 0;
};

struct DecodeTrace {
  Strategy strategy = Strategy::kGreedy;
  std::vector<DecodeStep> steps;
  std::int64_t forward_passes = 0;
};

struct DecodeResult {
  std::vector<TokenId> tokens;  // excludes EOS
  bool reached_eos = false;
  DecodeTrace trace;
};

// Provider failure mid-decode; carries the trace up to the failing step.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, DecodeTrace partial, std::exception_ptr cause)
      : Error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}

  const DecodeTrace& partial_trace() const { return partial_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  DecodeTrace partial_;
  std::exception_ptr cause_;
};

/// Autoregressive decoding until EOS or cfg.max_len tokens.
///
/// For vcd/vgs the image is distorted once up front and every step makes
/// one clean and one distorted provider call; greedy makes one call per step.
DecodeResult run_decode(const ModelProvider& provider, const Image& image, const Query& query,
                        const DecodeConfig& cfg);

std::string render_tokens(const Vocab& vocab, const std::vector<TokenId>& tokens);

// One JSON object per step: step, token_id, token_str, p_orig, p_dist, vgs, factor, strategy.
void write_trace_jsonl(std::ostream& out, const DecodeTrace& trace, const Vocab& vocab,
                       const std::string& strategy_label);

}  // namespace vgs
