// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vgs/decode.hpp"
#include "vgs/eval.hpp"
#include "vgs/image.hpp"
#include "vgs/model.hpp"

namespace vgs {

enum class ProviderKind { kScripted, kSynthetic, kRemote };

ProviderKind provider_kind_from_string(const std::string& name);
std::string to_string(ProviderKind kind);

struct ProviderSpec {
  ProviderKind kind = ProviderKind::kSynthetic;
  std::filesystem::path path;  // scripted table or synthetic spec
  std::string endpoint;        // remote only
  int top_k = 50;
  double timeout_s = 30.0;
  int max_in_flight = 4;
  // Remote vocabulary: either a {tokens, eos_id} file or size + eos.
  std::filesystem::path vocab_path;
  std::int64_t vocab_size = 0;
  TokenId eos_id = 0;

  void validate() const;
};

struct ExperimentConfig {
  std::filesystem::path dataset;
  ProviderSpec provider;
  std::vector<Strategy> strategies{Strategy::kGreedy, Strategy::kVgs};
  std::vector<double> alphas{1.0};
  NoiseParams noise;
  double delta = 0.01;
  double vcd_alpha = 1.0;
  double vcd_beta = 0.1;
  int max_len = 64;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  bool trace = false;
  unsigned workers = 0;  // 0 = hardware concurrency
  int bootstrap_resamples = 10000;

  // Run parameters only; the provider spec validates separately.
  void validate() const;

  // Relative paths inside the file resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// One (strategy, alpha) run of the sweep.
struct RunSpec {
  std::string label;
  Strategy strategy = Strategy::kGreedy;
  std::optional<double> alpha;
};

// Greedy first (always present, it is the delta baseline), then vcd, then vgs per alpha.
std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<EvalReport> reports;
  std::int64_t items = 0;
  std::int64_t failed_items = 0;  // failed in at least one run
  // traces[item_id] holds JSONL for every run, in run order.
  std::map<std::string, std::string> traces;

  double failure_rate() const { return items ? static_cast<double>(failed_items) / static_cast<double>(items) : 0.0; }
};

// Loads every dataset image (relative to the dataset file). Items whose image
// fails to load map to nullopt.
std::map<std::string, std::optional<Image>> load_dataset_images(const std::vector<VqaItem>& items,
                                                                const std::filesystem::path& dataset_path);

std::unique_ptr<ModelProvider> make_provider(const ProviderSpec& spec,
                                             const std::map<std::string, std::optional<Image>>& images);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Runs against an already-constructed provider. Synthetic providers must
// already hold references for every dataset image.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<VqaItem>& items,
                                const std::map<std::string, std::optional<Image>>& images,
                                const ModelProvider& provider);

enum class ReportFormat { kJson, kText };

std::string render_text_report(const std::vector<EvalReport>& reports);
nlohmann::json report_document(const std::vector<EvalReport>& reports, const ExperimentConfig& cfg,
                               const ExperimentResult& result);
std::vector<EvalReport> reports_from_document(const nlohmann::json& doc);

// Writes report.json / report.txt (and traces/ when present) under cfg.out_dir.
void emit_report(const ExperimentResult& result, const ExperimentConfig& cfg,
                 const std::vector<ReportFormat>& formats);

}  // namespace vgs
