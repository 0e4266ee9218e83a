// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances and time budgets are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "reference_rows.hpp"
#include "stub_server.hpp"
#include "vgs/benchmark.hpp"
#include "vgs/cli.hpp"
#include "vgs/decode.hpp"
#include "vgs/errors.hpp"
#include "vgs/eval.hpp"
#include "vgs/experiment.hpp"
#include "vgs/log.hpp"
#include "vgs/remote_model.hpp"
#include "vgs/rng.hpp"
#include "vgs/scripted_model.hpp"
#include "vgs/stats.hpp"
#include "vgs/synthetic_model.hpp"

using namespace vgs;
using namespace std::chrono_literals;
using vgs::testing::dist;
using vgs::testing::vec;
namespace fs = std::filesystem;

namespace {

// Arithmetic criteria.
constexpr double kExactTol = 1e-12;
constexpr double kOverallTol = 0.05;
constexpr double kMcnemarTol = 1e-5;
constexpr double kVcdTol = 1e-4;
// Distortion spread band for shot noise on a mid-grey image.
constexpr double kSdLow = 0.060, kSdHigh = 0.085;
// Hallucination benchmark.
constexpr int kEpisodes = 500;
constexpr double kMinRescueRate = 0.90;
constexpr double kMaxBootstrapP = 0.01;
constexpr int kMinScriptedFixtures = 100;
// Time budgets.
constexpr auto kBudgetArithmetic = 1s;
constexpr auto kBudgetGreedyEquivalence = 5s;
constexpr auto kBudgetSignature = 30s;
constexpr auto kBudgetSweep = 60s;
constexpr auto kBudgetRemote = 10s;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

int g_failures = 0;

void criterion(int number, const char* title, std::optional<std::chrono::milliseconds> budget,
               const std::function<Outcome()>& body) {
  const auto started = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  if (budget && elapsed > *budget) out.require(false, "runtime over " + std::to_string(budget->count()) + " ms");
  if (!out.pass) ++g_failures;
  std::printf("[%s] %2d. %s (%lld ms): %s\n", out.pass ? "PASS" : "FAIL", number, title,
              static_cast<long long>(elapsed.count()), out.detail.c_str());
  std::fflush(stdout);
}

// --- shared helpers --------------------------------------------------------

ProbDist random_dist(std::mt19937_64& gen, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LogitVec v(n);
  for (auto& x : v) x = u(gen) < 0.2 ? 0.0 : u(gen);
  v[static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(n))] += 0.5;
  return normalize(v);
}

// Random depth-3 scripted model with distinct clean and distorted views.
ScriptedModel random_scripted(std::mt19937_64& gen) {
  const Eigen::Index n = 3 + static_cast<Eigen::Index>(gen() % 4);
  std::vector<ScriptedContext> rows;
  std::vector<Prefix> frontier{{}};
  for (int depth = 0; depth < 3; ++depth) {
    std::vector<Prefix> next;
    for (const auto& y : frontier) {
      const bool last = depth == 2;
      const ProbDist clean = last ? ProbDist(LogitVec::Unit(n, 0)) : random_dist(gen, n);
      rows.push_back({"img0", y, false, clean});
      rows.push_back({"img0", y, true, last ? clean : random_dist(gen, n)});
      for (TokenId t = 1; t < n; ++t) {
        Prefix z = y;
        z.push_back(t);
        next.push_back(std::move(z));
      }
    }
    frontier = std::move(next);
  }
  return ScriptedModel(Vocab::placeholder(n, 0), rows);
}

struct BenchmarkRun {
  SyntheticBenchmark bench;
  std::unique_ptr<SyntheticModel> provider;
  std::map<std::string, std::optional<Image>> images;
  ExperimentConfig cfg;
};

BenchmarkRun make_run(std::vector<Strategy> strategies) {
  BenchmarkRun run;
  run.bench = make_hallucination_benchmark({.episodes = kEpisodes});
  run.provider = std::make_unique<SyntheticModel>(run.bench.spec);
  for (const auto& img : run.bench.images) {
    run.provider->add_reference(img);
    run.images.emplace(img.id(), img);
  }
  run.cfg.strategies = std::move(strategies);
  run.cfg.seed = 7;
  run.cfg.max_len = 4;
  return run;
}

// Runs the CLI with its console table swallowed, so only criterion lines print.
int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vgs-decode");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  auto* saved = std::cout.rdbuf(sink.rdbuf());
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(saved);
  return code;
}

// --- criteria --------------------------------------------------------------

Outcome exact_arithmetic() {
  Outcome out;
  const auto g = compute_vgs(dist({0.6, 0.4}), dist({0.2, 0.8}));
  out.require(std::abs(g[0] - 0.5) <= kExactTol, "VGS(0.6, 0.2) = " + fmt("%.15g", g[0]));

  const auto p = vgs_reweight(dist({0.5, 0.5}), VgsVec(vec({0.5, -0.5})), {1.0, 0.01});
  out.require(std::abs(p[0] - 0.75) <= kExactTol && std::abs(p[1] - 0.25) <= kExactTol,
              "factors 1.5/0.5 -> [" + fmt("%.15g", p[0]) + ", " + fmt("%.15g", p[1]) + "]");

  const auto f = reweight_factors(VgsVec(vec({-1.0})), {2.0, 0.01});
  out.require(std::abs(f[0] - 0.01) <= kExactTol, "floor factor = " + fmt("%.15g", f[0]));

  const auto z = compute_vgs(dist({0.0, 1.0}), dist({0.4, 0.6}));
  out.require(z[0] == -1.0, "VGS(0, 0.4) = " + fmt("%g", z[0]));
  return out;
}

Outcome greedy_equivalence() {
  Outcome out;
  std::mt19937_64 gen(2026);
  const Image img = testing::grey_image();
  int agree = 0;
  for (int i = 0; i < kMinScriptedFixtures; ++i) {
    const auto model = random_scripted(gen);
    DecodeConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.strategy = Strategy::kGreedy;
    const auto greedy = run_decode(model, img, Query("q"), cfg);
    cfg.strategy = Strategy::kVgs;
    cfg.vgs.alpha = 0.0;
    const auto vgs = run_decode(model, img, Query("q"), cfg);
    agree += greedy.tokens == vgs.tokens;
  }
  out.require(agree == kMinScriptedFixtures,
              std::to_string(agree) + "/" + std::to_string(kMinScriptedFixtures) + " fixtures identical");
  return out;
}

Outcome hallucination_signature() {
  Outcome out;
  auto run = make_run({Strategy::kGreedy, Strategy::kVgs});

  // (a) Mean first-step VGS of the two competing tokens, using the same
  // per-item distortion the runner applies.
  double vgs_grounded = 0.0, vgs_prior = 0.0;
  for (std::size_t i = 0; i < run.bench.items.size(); ++i) {
    const auto& item = run.bench.items[i];
    const auto& ep = run.bench.episodes[i];
    NoiseParams noise = run.cfg.noise;
    noise.seed = derive_seed(run.cfg.seed, item.id);
    const Image& clean = run.bench.images[i];
    const Query q(item.question);
    const auto g = compute_vgs(run.provider->distribution(clean, q, {}),
                               run.provider->distribution(distort(clean, noise), q, {}));
    vgs_grounded += g[ep.grounded] / kEpisodes;
    vgs_prior += g[ep.prior_driven] / kEpisodes;
  }
  out.require(vgs_grounded > 0.0 && vgs_prior < 0.0,
              "(a) mean VGS grounded " + fmt("%+.4f", vgs_grounded) + ", prior-driven " + fmt("%+.4f", vgs_prior));

  // (b) Rescue rate where greedy follows the prior.
  const auto result = run_experiment(run.cfg, run.bench.items, run.images, *run.provider);
  const auto& greedy = result.reports.at(0);
  const auto& vgs = result.reports.at(1);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < run.bench.items.size(); ++i) index[run.bench.items[i].id] = i;
  std::map<std::string, std::string> vgs_pred;
  for (const auto& rec : vgs.items) vgs_pred[rec.id] = rec.prediction;
  const auto& vocab = run.bench.spec.vocab;
  int hallucinated = 0, rescued = 0;
  for (const auto& rec : greedy.items) {
    const auto& ep = run.bench.episodes[index.at(rec.id)];
    if (rec.prediction != vocab.token(ep.prior_driven)) continue;
    ++hallucinated;
    rescued += vgs_pred.at(rec.id) == vocab.token(ep.grounded);
  }
  const double rate = hallucinated ? static_cast<double>(rescued) / hallucinated : 0.0;
  out.require(hallucinated > 0 && rate >= kMinRescueRate,
              "(b) vgs picks the grounded token in " + std::to_string(rescued) + "/" + std::to_string(hallucinated) +
                  " greedy hallucinations (" + fmt("%.3f", rate) + ")");

  // (c) Bootstrap significance of the accuracy delta.
  const bool has_sig = vgs.significance && vgs.significance->overall;
  const double p = has_sig ? vgs.significance->overall->p_value : 1.0;
  out.require(has_sig && p < kMaxBootstrapP, "(c) delta " + fmt("%+.4f", vgs.overall - greedy.overall) +
                                                 ", bootstrap p = " + fmt("%.4g", p));
  return out;
}

Outcome overall_consistency() {
  Outcome out;
  int ok = 0;
  std::string misses;
  for (const auto& row : testing::kReferenceRows) {
    const double overall = overall_score(row.open, row.closed, row.n_open, row.n_closed);
    if (std::abs(overall - row.overall) <= kOverallTol) {
      ++ok;
    } else {
      misses += std::string(" ") + row.model + "/" + row.method + "/" + row.dataset + " computes " +
                fmt("%.3f", overall) + " vs printed " + fmt("%.2f", row.overall);
    }
  }
  out.require(ok == static_cast<int>(testing::kReferenceRows.size()),
              std::to_string(ok) + "/" + std::to_string(testing::kReferenceRows.size()) + " rows within " +
                  fmt("%.2f", kOverallTol) + (misses.empty() ? "" : ";" + misses));
  return out;
}

Outcome alpha_sweep() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "vgs_acceptance_sweep";
  fs::remove_all(dir);
  if (run_cli({"make-synthetic", "--out", dir.string(), "--episodes", std::to_string(kEpisodes)}) != kExitOk) {
    out.require(false, "benchmark generation");
    return out;
  }
  const int code = run_cli({"--config", (dir / "config.json").string(), "--strategy", "greedy", "--strategy", "vgs",
                            "--alpha", "0", "--alpha", "0.5", "--alpha", "1.0", "--alpha", "1.5", "--alpha", "2.0",
                            "--out", (dir / "out").string(), "--format", "json"});
  out.require(code == kExitOk, "exit code " + std::to_string(code));
  if (code != kExitOk) return out;
  std::ifstream in(dir / "out" / "report.json");
  const auto reports = reports_from_document(nlohmann::json::parse(in));
  std::map<double, double> by_alpha;
  for (const auto& r : reports) {
    if (r.strategy == "vgs" && r.alpha) by_alpha[*r.alpha] = r.overall;
  }
  out.require(by_alpha.size() == 5, std::to_string(by_alpha.size()) + " vgs reports from one run");
  std::string sweep;
  for (const auto& [a, v] : by_alpha) sweep += " " + fmt("%g", a) + ":" + fmt("%.4f", v);
  out.require(by_alpha.contains(0.0) && by_alpha.contains(1.0) && by_alpha[0.0] < by_alpha[1.0],
              "overall by alpha" + sweep);
  fs::remove_all(dir);
  return out;
}

Outcome statistics_oracles() {
  Outcome out;
  const double p = mcnemar_exact({0, 10, 5, 0});
  out.require(std::abs(p - 0.30176) <= kMcnemarTol, "McNemar(10, 5) = " + fmt("%.6f", p));
  out.require(mcnemar_exact({3, 7, 7, 9}) == 1.0, "b = c gives p = 1");

  std::mt19937_64 gen(1);
  std::bernoulli_distribution coin(0.55);
  std::vector<double> a(200), b(200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = coin(gen);
    b[i] = coin(gen);
  }
  const auto r1 = bootstrap_delta(a, b, 10000, 99);
  const auto r2 = bootstrap_delta(a, b, 10000, 99);
  out.require(std::memcmp(&r1.p_value, &r2.p_value, sizeof(double)) == 0 && r1 == r2,
              "bootstrap bitwise repeatable (p = " + fmt("%.4f", r1.p_value) + ")");
  return out;
}

Outcome forward_passes() {
  Outcome out;
  auto run = make_run({});
  const CountingProvider counted(*run.provider);
  int episodes = 0, mismatches = 0;
  for (Strategy s : {Strategy::kGreedy, Strategy::kVcd, Strategy::kVgs}) {
    for (std::size_t i = 0; i < run.bench.items.size(); ++i) {
      DecodeConfig cfg;
      cfg.strategy = s;
      cfg.max_len = run.cfg.max_len;
      cfg.seed = derive_seed(run.cfg.seed, run.bench.items[i].id);
      const auto before = counted.calls();
      const auto r = run_decode(counted, run.bench.images[i], Query(run.bench.items[i].question), cfg);
      const std::int64_t per_step = s == Strategy::kGreedy ? 1 : 2;
      const auto steps = static_cast<std::int64_t>(r.trace.steps.size());
      mismatches += counted.calls() - before != per_step * steps || r.trace.forward_passes != per_step * steps;
      ++episodes;
    }
  }
  out.require(mismatches == 0, std::to_string(episodes - mismatches) + "/" + std::to_string(episodes) +
                                   " episodes with passes = per-step count x steps");
  return out;
}

Outcome distortion_statistics() {
  Outcome out;
  const Image v = Image::constant(64, 64, 1, 0.5);
  const Image noisy = distort(v, {0.07, 70.0, NoiseMode::kShot, 2026});
  const Eigen::ArrayXd d = noisy.pixels() - v.pixels();
  const double sd = std::sqrt((d - d.mean()).square().sum() / static_cast<double>(d.size() - 1));
  out.require(sd >= kSdLow && sd <= kSdHigh, "shot sd over 4096 px = " + fmt("%.4f", sd) + " (band [" +
                                                 fmt("%.3f", kSdLow) + ", " + fmt("%.3f", kSdHigh) +
                                                 "], sqrt(sigma^2 + 0.5/lambda) = " +
                                                 fmt("%.4f", std::sqrt(0.07 * 0.07 + 0.5 / 70.0)) + ")");

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::ArrayXd px(4096);
  for (auto& x : px) x = u(gen);
  const Image r(64, 64, 1, px);
  out.require((distort(r, NoiseParams::identity()).pixels() == r.pixels()).all(), "sigma = 0, no Poisson: identity");
  return out;
}

Outcome remote_conformance() {
  Outcome out;
  nlohmann::json body;
  testing::StubServer ok([&](const nlohmann::json&, httplib::Response& res) { testing::StubServer::reply(res, body); });
  const Image img = testing::grey_image();

  body = {{"vocab_size", 8}, {"eos_id", 0}, {"entries", {{3, 0.05}, {0, 0.9}}}};
  const auto sparse = remote_distribution(ok.endpoint(), img, Query("q"), {}, 5);
  out.require(sparse.size() == 2 && sparse[0].token == 0 && sparse[0].prob == 0.9 && sparse[1].token == 3 &&
                  sparse[1].prob == 0.05,
              "round trip {0: 0.9, 3: 0.05}");

  body = {{"vocab_size", 8}, {"eos_id", 0}, {"entries", {{0, 0.7}, {1, 0.5}}}};
  bool schema = false;
  try {
    remote_distribution(ok.endpoint(), img, Query("q"), {}, 5);
  } catch (const BackendError& e) {
    schema = e.kind() == BackendError::Kind::kSchema;
  }
  out.require(schema, "sum 1.2 rejected as schema violation");

  testing::StubServer slow([](const nlohmann::json&, httplib::Response& res) {
    std::this_thread::sleep_for(800ms);
    testing::StubServer::reply(res, {{"vocab_size", 2}, {"eos_id", 0}, {"entries", {{0, 1.0}}}});
  });
  RemoteOptions options;
  options.timeout = 250ms;
  int attempts = 0;
  bool timed_out = false;
  try {
    remote_distribution(slow.endpoint(), img, Query("q"), {}, 5, options);
  } catch (const BackendError& e) {
    timed_out = e.kind() == BackendError::Kind::kTimeout;
    attempts = e.attempts();
  }
  std::this_thread::sleep_for(50ms);
  out.require(timed_out && attempts == 2 && slow.requests() == 2,
              "timeout after " + std::to_string(slow.requests()) + " requests");
  return out;
}

Outcome metric_suite() {
  Outcome out;
  const double recall = token_recall("the right lobe is clear", "right upper lobe");
  out.require(std::abs(recall - 2.0 / 3.0) <= kExactTol, "token recall = " + fmt("%.6f", recall));
  const std::vector<std::string> preds{"Yes", "no"}, golds{"yes", "yes"};
  const double acc = closed_accuracy(preds, golds);
  out.require(acc == 0.5, "closed accuracy = " + fmt("%g", acc));
  const auto vcd = vcd_adjust(dist({0.6, 0.4}), dist({0.4, 0.6}), 1.0, 0.0);
  out.require(std::abs(vcd[0] - 0.6923) <= kVcdTol && std::abs(vcd[1] - 0.3077) <= kVcdTol,
              "VCD contrast (alpha 1, beta 0) = [" + fmt("%.4f", vcd[0]) + ", " + fmt("%.4f", vcd[1]) +
                  "], expected [0.6923, 0.3077]");
  return out;
}

}  // namespace

int main() {
  init_logging();
  criterion(1, "VGS and reweighting exact arithmetic", kBudgetArithmetic, exact_arithmetic);
  criterion(2, "alpha = 0 reproduces greedy on random scripted fixtures", kBudgetGreedyEquivalence,
            greedy_equivalence);
  criterion(3, "hallucination signature on the synthetic benchmark", kBudgetSignature, hallucination_signature);
  criterion(4, "published overall = count-weighted mean", kBudgetArithmetic, overall_consistency);
  criterion(5, "alpha sweep in one run, overall(0) < overall(1)", kBudgetSweep, alpha_sweep);
  criterion(6, "McNemar and bootstrap oracles", std::nullopt, statistics_oracles);
  criterion(7, "forward-pass accounting", std::nullopt, forward_passes);
  criterion(8, "distortion statistics", std::nullopt, distortion_statistics);
  criterion(9, "remote protocol conformance", kBudgetRemote, remote_conformance);
  criterion(10, "metric unit suite", std::nullopt, metric_suite);
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
