// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/benchmark.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"
#include "vgs/image_io.hpp"

namespace vgs {

namespace {

struct AnswerPair {
  const char* first;
  const char* second;
  const char* question;
  QuestionType qtype;
};

constexpr AnswerPair kPairs[] = {
    {"yes", "no", "Is there a pleural effusion?", QuestionType::kClosed},
    {"left", "right", "Which side is the opacity on?", QuestionType::kOpen},
    {"yes", "no", "Is the heart enlarged?", QuestionType::kClosed},
    {"upper", "lower", "Which lobe shows consolidation?", QuestionType::kOpen},
    {"yes", "no", "Is there a pneumothorax?", QuestionType::kClosed},
    {"effusion", "pneumothorax", "What is the main finding?", QuestionType::kOpen},
    {"increased", "decreased", "How has the opacity changed?", QuestionType::kOpen},
};

ProbDist two_point(std::int64_t vocab_size, TokenId a, double pa, TokenId b) {
  LogitVec v = LogitVec::Zero(vocab_size);
  v[a] = pa;
  v[b] = 1.0 - pa;
  return ProbDist(v);
}

ProbDist one_hot(std::int64_t vocab_size, TokenId t) {
  LogitVec v = LogitVec::Zero(vocab_size);
  v[t] = 1.0;
  return ProbDist(v);
}

}  // namespace

SyntheticBenchmark make_hallucination_benchmark(const BenchmarkOptions& options) {
  if (options.episodes < 1) throw ConfigError("benchmark needs at least one episode");
  SyntheticBenchmark bench;
  bench.spec.vocab = Vocab({"<eos>", "yes", "no", "left", "right", "upper", "lower", "effusion", "pneumothorax",
                            "increased", "decreased"},
                           0);
  bench.spec.g0 = options.g0;
  bench.spec.decay = options.decay;
  const auto& vocab = bench.spec.vocab;
  const auto n = vocab.size();

  // Once an answer token is out, both tables end the sequence.
  for (TokenId t = 0; t < n; ++t) {
    if (t == vocab.eos()) continue;
    bench.spec.prior.push_back({std::nullopt, Prefix{t}, one_hot(n, vocab.eos())});
  }

  std::mt19937_64 gen(options.seed);
  std::uniform_real_distribution<double> prior_mass(options.prior_low, options.prior_high);
  std::uniform_real_distribution<double> visual_mass(options.visual_low, options.visual_high);
  std::uniform_real_distribution<double> texture(0.2, 0.8);
  std::bernoulli_distribution coin(0.5);

  constexpr std::size_t kPairCount = sizeof(kPairs) / sizeof(kPairs[0]);
  for (int e = 0; e < options.episodes; ++e) {
    const AnswerPair& pair = kPairs[static_cast<std::size_t>(e) % kPairCount];
    TokenId grounded = vocab.find(pair.first);
    TokenId prior_driven = vocab.find(pair.second);
    if (coin(gen)) std::swap(grounded, prior_driven);

    char id[32];
    std::snprintf(id, sizeof(id), "ep%04d", e);
    const std::string image_ref = std::string("images/") + id + ".f32";
    const std::string question = std::string(pair.question) + " [" + id + "]";

    const double pi = prior_mass(gen);
    const double nu = visual_mass(gen);
    bench.spec.prior.push_back({question, Prefix{}, two_point(n, prior_driven, pi, grounded)});
    bench.spec.visual.push_back({image_ref, Prefix{}, two_point(n, grounded, nu, prior_driven)});
    bench.spec.visual.push_back({image_ref, std::nullopt, one_hot(n, vocab.eos())});

    const int side = options.image_size;
    Eigen::ArrayXd pixels(side * side);
    for (Eigen::Index i = 0; i < pixels.size(); ++i) pixels[i] = texture(gen);
    // f32 storage rounds pixels; keep the in-memory copy identical to what a reload yields.
    pixels = pixels.cast<float>().cast<double>();
    bench.images.emplace_back(side, side, 1, std::move(pixels), image_ref);

    bench.items.push_back({id, image_ref, question, vocab.token(grounded), pair.qtype});
    bench.episodes.push_back({grounded, prior_driven});
  }
  bench.spec.validate();
  return bench;
}

void write_benchmark(const SyntheticBenchmark& bench, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  {
    std::ofstream out(dir / "dataset.jsonl");
    if (!out) throw ConfigError("cannot write " + (dir / "dataset.jsonl").string());
    for (const auto& item : bench.items) {
      out << nlohmann::json{{"id", item.id},
                            {"image", item.image},
                            {"question", item.question},
                            {"answer", item.answer},
                            {"qtype", to_string(item.qtype)}}
                 .dump()
          << '\n';
    }
  }
  for (const auto& image : bench.images) write_f32(dir / image.id(), image);
  {
    std::ofstream out(dir / "provider.json");
    if (!out) throw ConfigError("cannot write " + (dir / "provider.json").string());
    out << bench.spec.to_json() << '\n';
  }
  {
    std::ofstream out(dir / "config.json");
    if (!out) throw ConfigError("cannot write " + (dir / "config.json").string());
    const nlohmann::json cfg = {{"dataset", "dataset.jsonl"},
                                {"provider", {{"kind", "synthetic"}, {"path", "provider.json"}}},
                                {"strategies", {"greedy", "vcd", "vgs"}},
                                {"alphas", {1.0}},
                                {"max_len", 4},
                                {"seed", 7},
                                {"out", "out"}};
    out << cfg.dump(2) << '\n';
  }
}

}  // namespace vgs
