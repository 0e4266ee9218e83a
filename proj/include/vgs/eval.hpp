// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vgs/stats.hpp"

namespace vgs {

enum class QuestionType { kOpen, kClosed };

std::string to_string(QuestionType qtype);
QuestionType question_type_from_string(const std::string& name);

struct VqaItem {
  std::string id;
  std::string image;  // path relative to the dataset file, also the image id
  std::string question;
  std::string answer;
  QuestionType qtype = QuestionType::kOpen;
};

// JSONL with fields id, image, question, answer, qtype. Throws ConfigError.
std::vector<VqaItem> parse_dataset(std::istream& in);
std::vector<VqaItem> load_dataset(const std::filesystem::path& path);

// Lower-case, drop .,;:!?"'() characters, split on whitespace, map yes/no synonyms.
std::vector<std::string> normalize_answer(std::string_view text);

// First normalized token equal, or whole normalized sequences equal.
bool closed_match(std::string_view prediction, std::string_view gold);

double closed_accuracy(std::span<const std::string> predictions, std::span<const std::string> golds);

// |set(gold) ∩ set(pred)| / |set(gold)| over normalized tokens; throws
// UndefinedMetric when the gold answer normalizes to nothing.
double token_recall(std::string_view prediction, std::string_view gold);

double overall_score(double open_recall, double closed_acc, std::int64_t n_open, std::int64_t n_closed);

enum class ItemStatus { kScored, kExcluded, kFailed };

struct ItemRecord {
  std::string id;
  QuestionType qtype = QuestionType::kOpen;
  std::string prediction;
  std::string answer;
  double score = 0.0;  // recall for open items, 0/1 for closed items
  ItemStatus status = ItemStatus::kScored;
  std::string error;

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

ItemRecord score_item(const VqaItem& item, const std::string& prediction);

struct Significance {
  PairedOutcomes closed;  // A = baseline, B = this method
  double mcnemar_exact_p = 1.0;
  double mcnemar_chi2_p = 1.0;
  std::optional<BootstrapResult> open_recall;
  std::optional<BootstrapResult> overall;

  friend bool operator==(const Significance& a, const Significance& b) {
    return a.closed.n00 == b.closed.n00 && a.closed.n01 == b.closed.n01 && a.closed.n10 == b.closed.n10 &&
           a.closed.n11 == b.closed.n11 && a.mcnemar_exact_p == b.mcnemar_exact_p &&
           a.mcnemar_chi2_p == b.mcnemar_chi2_p && a.open_recall == b.open_recall && a.overall == b.overall;
  }
};

struct EvalReport {
  std::string label;     // e.g. "greedy", "vgs", "vgs@1.5"
  std::string strategy;  // greedy | vcd | vgs
  std::optional<double> alpha;
  double open_recall = 0.0;
  double closed_acc = 0.0;
  double overall = 0.0;
  std::int64_t n_open = 0;
  std::int64_t n_closed = 0;
  std::int64_t n_excluded = 0;
  std::int64_t n_failed = 0;
  std::optional<double> delta_vs_baseline;
  std::optional<Significance> significance;
  std::vector<ItemRecord> items;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Scored items only enter the metric denominators.
EvalReport aggregate_report(std::string label, std::string strategy, std::optional<double> alpha,
                            std::vector<ItemRecord> items);

// Paired significance of `method` against `baseline`, matched by item id.
Significance compare_reports(const EvalReport& baseline, const EvalReport& method, int n_resamples,
                             std::uint64_t seed);

void to_json(nlohmann::json& j, const EvalReport& report);
void from_json(const nlohmann::json& j, EvalReport& report);

}  // namespace vgs
