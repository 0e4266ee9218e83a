// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "vgs/benchmark.hpp"
#include "vgs/experiment.hpp"
#include "vgs/log.hpp"

namespace vgs {

namespace {

struct RunFlags {
  std::string config;
  std::string dataset;
  std::vector<std::string> strategies;
  std::vector<double> alphas;
  std::optional<double> sigma, lambda, delta;
  std::optional<std::string> noise_mode;
  std::optional<int> max_len;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool trace = false;
  std::string endpoint;
  std::string provider;
  std::string provider_file;
  std::optional<unsigned> workers;
  std::optional<int> bootstrap;
  std::string format = "both";
};

ExperimentConfig build_config(const RunFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = ExperimentConfig::load(f.config);
  if (!f.dataset.empty()) cfg.dataset = f.dataset;
  if (!f.provider.empty()) cfg.provider.kind = provider_kind_from_string(f.provider);
  if (!f.provider_file.empty()) cfg.provider.path = f.provider_file;
  if (!f.endpoint.empty()) {
    cfg.provider.endpoint = f.endpoint;
    if (f.provider.empty()) cfg.provider.kind = ProviderKind::kRemote;
  }
  if (!f.strategies.empty()) {
    cfg.strategies.clear();
    for (const auto& s : f.strategies) cfg.strategies.push_back(strategy_from_string(s));
  }
  if (!f.alphas.empty()) cfg.alphas = f.alphas;
  if (f.sigma) cfg.noise.sigma = *f.sigma;
  if (f.lambda) cfg.noise.lambda = *f.lambda;
  if (f.noise_mode) cfg.noise.mode = noise_mode_from_string(*f.noise_mode);
  if (f.delta) cfg.delta = *f.delta;
  if (f.max_len) cfg.max_len = *f.max_len;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.trace) cfg.trace = true;
  if (f.workers) cfg.workers = *f.workers;
  if (f.bootstrap) cfg.bootstrap_resamples = *f.bootstrap;
  if (cfg.dataset.empty()) throw ConfigError("no dataset given (--dataset or config 'dataset')");
  return cfg;
}

int run_command(const RunFlags& flags) {
  ExperimentConfig cfg;
  ExperimentResult result;
  try {
    cfg = build_config(flags);
    result = run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  std::vector<ReportFormat> formats;
  if (flags.format == "json" || flags.format == "both") formats.push_back(ReportFormat::kJson);
  if (flags.format == "text" || flags.format == "both") formats.push_back(ReportFormat::kText);
  try {
    emit_report(result, cfg, formats);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  std::cout << render_text_report(result.reports);
  if (result.failed_items > 0) {
    std::cout << result.failed_items << " of " << result.items << " items failed\n";
  }
  if (result.failure_rate() > 0.10) {
    std::cerr << "error: " << result.failed_items << " of " << result.items << " items failed (> 10%)\n";
    return kExitTooManyFailures;
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  init_logging();
  CLI::App app{"Visual-grounding-score guided decoding experiments", "vgs-decode"};
  app.require_subcommand(0, 1);

  RunFlags f;
  app.add_option("--config", f.config, "Experiment config JSON");
  app.add_option("--dataset", f.dataset, "Dataset JSONL");
  app.add_option("--strategy", f.strategies, "Decoding strategy (repeatable): greedy, vcd, vgs")
      ->check(CLI::IsMember({"greedy", "vcd", "vgs"}));
  app.add_option("--alpha", f.alphas, "VGS reweighting strength (repeatable)");
  app.add_option("--sigma", f.sigma, "Gaussian noise standard deviation");
  app.add_option("--lambda", f.lambda, "Poisson noise scale");
  app.add_option("--noise-mode", f.noise_mode, "shot or literal")->check(CLI::IsMember({"shot", "literal"}));
  app.add_option("--delta", f.delta, "Reweighting factor floor");
  app.add_option("--max-len", f.max_len, "Maximum generated tokens");
  app.add_option("--seed", f.seed, "Experiment seed");
  app.add_option("--out", f.out, "Output directory");
  app.add_flag("--trace", f.trace, "Write per-item decode traces");
  app.add_option("--endpoint", f.endpoint, "Remote inference endpoint (implies --provider remote)");
  app.add_option("--provider", f.provider, "scripted, synthetic or remote")
      ->check(CLI::IsMember({"scripted", "synthetic", "remote"}));
  app.add_option("--provider-file", f.provider_file, "Scripted table or synthetic spec JSON");
  app.add_option("--workers", f.workers, "Worker threads (default: hardware concurrency)");
  app.add_option("--bootstrap-resamples", f.bootstrap, "Bootstrap resamples for significance");
  app.add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "text", "both"}));

  auto* make = app.add_subcommand("make-synthetic", "Write the synthetic hallucination benchmark");
  std::string bench_out;
  BenchmarkOptions bench_opts;
  make->add_option("--out", bench_out, "Output directory")->required();
  make->add_option("--episodes", bench_opts.episodes, "Number of episodes");
  make->add_option("--seed", bench_opts.seed, "Generator seed");
  make->add_option("--g0", bench_opts.g0, "Base grounding coefficient");
  make->add_option("--decay", bench_opts.decay, "Grounding decay per unit noise energy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse failure is bad input.
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  if (*make) {
    try {
      write_benchmark(make_hallucination_benchmark(bench_opts), bench_out);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInputError;
    }
    std::cout << "wrote " << bench_opts.episodes << " episodes to " << bench_out << '\n';
    return kExitOk;
  }
  return run_command(f);
}

}  // namespace vgs
