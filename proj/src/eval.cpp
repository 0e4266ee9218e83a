// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/eval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vgs/errors.hpp"

namespace vgs {

std::string to_string(QuestionType qtype) { return qtype == QuestionType::kOpen ? "open" : "closed"; }

QuestionType question_type_from_string(const std::string& name) {
  if (name == "open") return QuestionType::kOpen;
  if (name == "closed") return QuestionType::kClosed;
  throw ConfigError("unknown qtype '" + name + "'");
}

std::vector<VqaItem> parse_dataset(std::istream& in) {
  std::vector<VqaItem> items;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      VqaItem item;
      item.id = j.at("id").get<std::string>();
      item.image = j.at("image").get<std::string>();
      item.question = j.at("question").get<std::string>();
      item.answer = j.at("answer").get<std::string>();
      item.qtype = question_type_from_string(j.at("qtype").get<std::string>());
      if (!ids.insert(item.id).second) throw ConfigError("duplicate item id '" + item.id + "'");
      items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("dataset line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return items;
}

std::vector<VqaItem> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

std::vector<std::string> normalize_answer(std::string_view text) {
  static constexpr std::string_view kPunctuation = ".,;:!?\"'()";
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char ch : text) {
    if (kPunctuation.find(ch) != std::string_view::npos) continue;
    cleaned.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  std::vector<std::string> tokens;
  std::istringstream ss(cleaned);
  for (std::string tok; ss >> tok;) {
    if (tok == "yeah" || tok == "yep" || tok == "true") tok = "yes";
    else if (tok == "nope" || tok == "false") tok = "no";
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

bool closed_match(std::string_view prediction, std::string_view gold) {
  const auto p = normalize_answer(prediction);
  const auto g = normalize_answer(gold);
  if (p == g) return true;
  return !p.empty() && !g.empty() && p.front() == g.front();
}

double closed_accuracy(std::span<const std::string> predictions, std::span<const std::string> golds) {
  if (predictions.size() != golds.size()) throw InvalidInput("closed_accuracy: length mismatch");
  if (predictions.empty()) throw InvalidInput("closed_accuracy: no items");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hits += closed_match(predictions[i], golds[i]);
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double token_recall(std::string_view prediction, std::string_view gold) {
  const auto g = normalize_answer(gold);
  if (g.empty()) throw UndefinedMetric("token recall undefined for an empty gold answer");
  const std::set<std::string> gold_set(g.begin(), g.end());
  const auto p = normalize_answer(prediction);
  const std::set<std::string> pred_set(p.begin(), p.end());
  std::size_t hit = 0;
  for (const auto& tok : gold_set) hit += pred_set.contains(tok);
  return static_cast<double>(hit) / static_cast<double>(gold_set.size());
}

double overall_score(double open_recall, double closed_acc, std::int64_t n_open, std::int64_t n_closed) {
  if (n_open < 0 || n_closed < 0) throw InvalidInput("question counts must be >= 0");
  if (n_open + n_closed == 0) throw InvalidInput("overall score needs at least one question");
  return (static_cast<double>(n_open) * open_recall + static_cast<double>(n_closed) * closed_acc) /
         static_cast<double>(n_open + n_closed);
}

ItemRecord score_item(const VqaItem& item, const std::string& prediction) {
  ItemRecord rec;
  rec.id = item.id;
  rec.qtype = item.qtype;
  rec.prediction = prediction;
  rec.answer = item.answer;
  if (item.qtype == QuestionType::kClosed) {
    rec.score = closed_match(prediction, item.answer) ? 1.0 : 0.0;
    return rec;
  }
  try {
    rec.score = token_recall(prediction, item.answer);
  } catch (const UndefinedMetric& e) {
    rec.status = ItemStatus::kExcluded;
    rec.error = e.what();
  }
  return rec;
}

EvalReport aggregate_report(std::string label, std::string strategy, std::optional<double> alpha,
                            std::vector<ItemRecord> items) {
  EvalReport report;
  report.label = std::move(label);
  report.strategy = std::move(strategy);
  report.alpha = alpha;
  std::sort(items.begin(), items.end(), [](const ItemRecord& a, const ItemRecord& b) { return a.id < b.id; });
  double open_sum = 0.0, closed_sum = 0.0;
  for (const auto& rec : items) {
    switch (rec.status) {
      case ItemStatus::kFailed: ++report.n_failed; break;
      case ItemStatus::kExcluded: ++report.n_excluded; break;
      case ItemStatus::kScored:
        if (rec.qtype == QuestionType::kOpen) {
          ++report.n_open;
          open_sum += rec.score;
        } else {
          ++report.n_closed;
          closed_sum += rec.score;
        }
        break;
    }
  }
  if (report.n_open) report.open_recall = open_sum / static_cast<double>(report.n_open);
  if (report.n_closed) report.closed_acc = closed_sum / static_cast<double>(report.n_closed);
  if (report.n_open + report.n_closed > 0) {
    report.overall = overall_score(report.open_recall, report.closed_acc, report.n_open, report.n_closed);
  }
  report.items = std::move(items);
  return report;
}

Significance compare_reports(const EvalReport& baseline, const EvalReport& method, int n_resamples,
                             std::uint64_t seed) {
  std::map<std::string, const ItemRecord*> base;
  for (const auto& rec : baseline.items) {
    if (rec.status == ItemStatus::kScored) base.emplace(rec.id, &rec);
  }
  std::vector<bool> closed_a, closed_b;
  std::vector<double> open_a, open_b, all_a, all_b;
  for (const auto& rec : method.items) {
    if (rec.status != ItemStatus::kScored) continue;
    auto it = base.find(rec.id);
    if (it == base.end()) continue;
    all_a.push_back(it->second->score);
    all_b.push_back(rec.score);
    if (rec.qtype == QuestionType::kClosed) {
      closed_a.push_back(it->second->score > 0.5);
      closed_b.push_back(rec.score > 0.5);
    } else {
      open_a.push_back(it->second->score);
      open_b.push_back(rec.score);
    }
  }
  Significance sig;
  for (std::size_t i = 0; i < closed_a.size(); ++i) {
    if (closed_a[i]) (closed_b[i] ? sig.closed.n11 : sig.closed.n10)++;
    else (closed_b[i] ? sig.closed.n01 : sig.closed.n00)++;
  }
  if (!closed_a.empty()) {
    sig.mcnemar_exact_p = mcnemar_exact(sig.closed);
    sig.mcnemar_chi2_p = mcnemar_chi2(sig.closed);
  }
  if (open_a.size() >= 2) sig.open_recall = bootstrap_delta(open_a, open_b, n_resamples, seed);
  if (all_a.size() >= 2) sig.overall = bootstrap_delta(all_a, all_b, n_resamples, seed);
  return sig;
}

namespace {

std::string status_name(ItemStatus s) {
  switch (s) {
    case ItemStatus::kScored: return "scored";
    case ItemStatus::kExcluded: return "excluded";
    case ItemStatus::kFailed: return "failed";
  }
  return "scored";
}

ItemStatus status_from_name(const std::string& s) {
  if (s == "scored") return ItemStatus::kScored;
  if (s == "excluded") return ItemStatus::kExcluded;
  if (s == "failed") return ItemStatus::kFailed;
  throw ConfigError("unknown item status '" + s + "'");
}

nlohmann::json bootstrap_json(const BootstrapResult& r) {
  return {{"observed", r.observed}, {"p_value", r.p_value},     {"ci_low", r.ci_low},
          {"ci_high", r.ci_high},   {"n_resamples", r.n_resamples}, {"seed", r.seed}};
}

BootstrapResult bootstrap_from_json(const nlohmann::json& j) {
  BootstrapResult r;
  r.observed = j.at("observed").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.n_resamples = j.at("n_resamples").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

}  // namespace

void to_json(nlohmann::json& j, const EvalReport& report) {
  j = nlohmann::json{{"label", report.label},
                     {"strategy", report.strategy},
                     {"alpha", report.alpha ? nlohmann::json(*report.alpha) : nlohmann::json(nullptr)},
                     {"open_recall", report.open_recall},
                     {"closed_acc", report.closed_acc},
                     {"overall", report.overall},
                     {"n_open", report.n_open},
                     {"n_closed", report.n_closed},
                     {"n_excluded", report.n_excluded},
                     {"n_failed", report.n_failed},
                     {"delta_vs_baseline", report.delta_vs_baseline ? nlohmann::json(*report.delta_vs_baseline)
                                                                    : nlohmann::json(nullptr)}};
  if (report.significance) {
    const auto& s = *report.significance;
    nlohmann::json sig = {{"closed_outcomes", {s.closed.n00, s.closed.n01, s.closed.n10, s.closed.n11}},
                          {"mcnemar_exact_p", s.mcnemar_exact_p},
                          {"mcnemar_chi2_p", s.mcnemar_chi2_p},
                          {"open_recall_bootstrap", s.open_recall ? bootstrap_json(*s.open_recall) : nlohmann::json(nullptr)},
                          {"overall_bootstrap", s.overall ? bootstrap_json(*s.overall) : nlohmann::json(nullptr)}};
    j["significance"] = std::move(sig);
  } else {
    j["significance"] = nullptr;
  }
  auto& items = j["items"] = nlohmann::json::array();
  for (const auto& rec : report.items) {
    nlohmann::json r = {{"id", rec.id},
                        {"qtype", to_string(rec.qtype)},
                        {"prediction", rec.prediction},
                        {"answer", rec.answer},
                        {"score", rec.score},
                        {"status", status_name(rec.status)}};
    if (!rec.error.empty()) r["error"] = rec.error;
    items.push_back(std::move(r));
  }
}

void from_json(const nlohmann::json& j, EvalReport& report) {
  report = EvalReport{};
  report.label = j.at("label").get<std::string>();
  report.strategy = j.at("strategy").get<std::string>();
  if (!j.at("alpha").is_null()) report.alpha = j.at("alpha").get<double>();
  report.open_recall = j.at("open_recall").get<double>();
  report.closed_acc = j.at("closed_acc").get<double>();
  report.overall = j.at("overall").get<double>();
  report.n_open = j.at("n_open").get<std::int64_t>();
  report.n_closed = j.at("n_closed").get<std::int64_t>();
  report.n_excluded = j.at("n_excluded").get<std::int64_t>();
  report.n_failed = j.at("n_failed").get<std::int64_t>();
  if (!j.at("delta_vs_baseline").is_null()) report.delta_vs_baseline = j.at("delta_vs_baseline").get<double>();
  if (j.contains("significance") && !j.at("significance").is_null()) {
    const auto& s = j.at("significance");
    Significance sig;
    const auto counts = s.at("closed_outcomes").get<std::vector<std::int64_t>>();
    if (counts.size() != 4) throw ConfigError("closed_outcomes must hold four counts");
    sig.closed = {counts[0], counts[1], counts[2], counts[3]};
    sig.mcnemar_exact_p = s.at("mcnemar_exact_p").get<double>();
    sig.mcnemar_chi2_p = s.at("mcnemar_chi2_p").get<double>();
    if (!s.at("open_recall_bootstrap").is_null()) sig.open_recall = bootstrap_from_json(s.at("open_recall_bootstrap"));
    if (!s.at("overall_bootstrap").is_null()) sig.overall = bootstrap_from_json(s.at("overall_bootstrap"));
    report.significance = sig;
  }
  for (const auto& r : j.at("items")) {
    ItemRecord rec;
    rec.id = r.at("id").get<std::string>();
    rec.qtype = question_type_from_string(r.at("qtype").get<std::string>());
    rec.prediction = r.at("prediction").get<std::string>();
    rec.answer = r.at("answer").get<std::string>();
    rec.score = r.at("score").get<double>();
    rec.status = status_from_name(r.at("status").get<std::string>());
    rec.error = r.value("error", std::string());
    report.items.push_back(std::move(rec));
  }
}

}  // namespace vgs
