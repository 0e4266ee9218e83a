// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/decode.hpp"

#include <future>

#include "json.hpp"

namespace vgs {

void VgsParams::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("vgs alpha must be finite and >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("vgs delta must lie in (0,1)");
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kVcd: return "vcd";
    case Strategy::kVgs: return "vgs";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "greedy") return Strategy::kGreedy;
  if (name == "vcd") return Strategy::kVcd;
  if (name == "vgs") return Strategy::kVgs;
  throw ConfigError("unknown strategy '" + name + "'");
}

void DecodeConfig::validate() const {
  vgs.validate();
  if (!std::isfinite(vcd_alpha) || vcd_alpha < 0.0) throw ConfigError("vcd alpha must be >= 0");
  if (!(vcd_beta >= 0.0 && vcd_beta <= 1.0)) throw ConfigError("vcd beta must lie in [0,1]");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (!(tail_floor > 0.0)) throw ConfigError("tail_floor must be > 0");
  if (strategy != Strategy::kGreedy) noise.validate();
}

namespace {

struct StepDistributions {
  ProbDist orig;
  std::optional<ProbDist> dist;
};

StepDistributions fetch(const ModelProvider& provider, const Image& clean, const Image* distorted,
                        const Query& query, const Prefix& prefix, const DecodeConfig& cfg) {
  const auto vocab_size = provider.vocab().size();
  StepDistributions out;
  if (provider.capability() == Capability::kSparseTopK) {
    if (distorted == nullptr) {
      out.orig = densify(provider.sparse_distribution(clean, query, prefix), vocab_size, cfg.tail_floor);
      return out;
    }
    SparseDist a, b;
    if (cfg.concurrent_passes) {
      auto pending = std::async(std::launch::async, [&] { return provider.sparse_distribution(*distorted, query, prefix); });
      a = provider.sparse_distribution(clean, query, prefix);
      b = pending.get();
    } else {
      a = provider.sparse_distribution(clean, query, prefix);
      b = provider.sparse_distribution(*distorted, query, prefix);
    }
    auto [orig, dist] = densify_pair(a, b, vocab_size, cfg.tail_floor);
    out.orig = std::move(orig);
    out.dist = std::move(dist);
  } else {
    if (distorted != nullptr && cfg.concurrent_passes) {
      auto pending = std::async(std::launch::async, [&] { return provider.distribution(*distorted, query, prefix); });
      out.orig = provider.distribution(clean, query, prefix);
      out.dist = pending.get();
    } else {
      out.orig = provider.distribution(clean, query, prefix);
      if (distorted != nullptr) out.dist = provider.distribution(*distorted, query, prefix);
    }
  }
  if (out.orig.size() != vocab_size || (out.dist && out.dist->size() != vocab_size)) {
    throw InvalidInput("provider returned a distribution of the wrong length");
  }
  return out;
}

}  // namespace

DecodeResult run_decode(const ModelProvider& provider, const Image& image, const Query& query,
                        const DecodeConfig& cfg) {
  cfg.validate();
  const Vocab& vocab = provider.vocab();
  if (vocab.size() == 0) throw InvalidInput("provider vocabulary is empty");

  DecodeResult result;
  result.trace.strategy = cfg.strategy;
  const bool contrastive = cfg.strategy != Strategy::kGreedy;

  std::optional<Image> distorted;
  if (contrastive) {
    NoiseParams noise = cfg.noise;
    noise.seed = cfg.seed;
    distorted = distort(image, noise);
  }

  Prefix prefix;
  for (int step = 0; step < cfg.max_len; ++step) {
    StepDistributions d;
    try {
      d = fetch(provider, image, distorted ? &*distorted : nullptr, query, prefix, cfg);
    } catch (const std::exception& e) {
      throw DecodeError("decode aborted at step " + std::to_string(step) + ": " + e.what(), result.trace,
                        std::current_exception());
    }
    result.trace.forward_passes += contrastive ? 2 : 1;

    DecodeStep rec;
    rec.step = step;
    switch (cfg.strategy) {
      case Strategy::kGreedy: {
        rec.token = d.orig.argmax();
        rec.p_final = d.orig[rec.token];
        break;
      }
      case Strategy::kVgs: {
        const VgsVec scores = compute_vgs(d.orig, *d.dist);
        const ProbDist final_dist = vgs_reweight(d.orig, scores, cfg.vgs);
        rec.token = final_dist.argmax();
        rec.p_final = final_dist[rec.token];
        rec.p_dist = (*d.dist)[rec.token];
        rec.vgs = scores[rec.token];
        rec.factor = std::max(1.0 + cfg.vgs.alpha * scores[rec.token], cfg.vgs.delta);
        break;
      }
      case Strategy::kVcd: {
        const ProbDist final_dist = vcd_adjust(d.orig, *d.dist, cfg.vcd_alpha, cfg.vcd_beta);
        rec.token = final_dist.argmax();
        rec.p_final = final_dist[rec.token];
        rec.p_dist = (*d.dist)[rec.token];
        rec.vgs = compute_vgs(d.orig, *d.dist)[rec.token];
        rec.factor = d.orig[rec.token] > 0.0 ? rec.p_final / d.orig[rec.token] : 0.0;
        break;
      }
    }
    rec.p_orig = d.orig[rec.token];
    rec.orig_rank = d.orig.rank_of(rec.token);
    result.trace.steps.push_back(rec);

    if (rec.token == vocab.eos()) {
      result.reached_eos = true;
      break;
    }
    result.tokens.push_back(rec.token);
    prefix.push_back(rec.token);
  }
  return result;
}

std::string render_tokens(const Vocab& vocab, const std::vector<TokenId>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += vocab.token(tokens[i]);
  }
  return out;
}

void write_trace_jsonl(std::ostream& out, const DecodeTrace& trace, const Vocab& vocab,
                       const std::string& strategy_label) {
  for (const auto& s : trace.steps) {
    nlohmann::json rec = {{"step", s.step},
                          {"token_id", s.token},
                          {"token_str", vocab.token(s.token)},
                          {"p_orig", s.p_orig},
                          {"p_dist", s.p_dist ? nlohmann::json(*s.p_dist) : nlohmann::json(nullptr)},
                          {"vgs", s.vgs ? nlohmann::json(*s.vgs) : nlohmann::json(nullptr)},
                          {"factor", s.factor},
                          {"strategy", strategy_label}};
    out << rec.dump() << '\n';
  }
}

}  // namespace vgs
