// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "json_util.hpp"
#include "vgs/image_io.hpp"
#include "vgs/remote_model.hpp"
#include "vgs/rng.hpp"
#include "vgs/scripted_model.hpp"
#include "vgs/synthetic_model.hpp"

namespace vgs {

ProviderKind provider_kind_from_string(const std::string& name) {
  if (name == "scripted") return ProviderKind::kScripted;
  if (name == "synthetic") return ProviderKind::kSynthetic;
  if (name == "remote") return ProviderKind::kRemote;
  throw ConfigError("unknown provider kind '" + name + "'");
}

std::string to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kScripted: return "scripted";
    case ProviderKind::kSynthetic: return "synthetic";
    case ProviderKind::kRemote: return "remote";
  }
  return "synthetic";
}

void ExperimentConfig::validate() const {
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  if (alphas.empty()) throw ConfigError("at least one alpha is required");
  for (double a : alphas) VgsParams{a, delta}.validate();
  noise.validate();
  if (!std::isfinite(vcd_alpha) || vcd_alpha < 0.0) throw ConfigError("vcd alpha must be >= 0");
  if (!(vcd_beta >= 0.0 && vcd_beta <= 1.0)) throw ConfigError("vcd beta must lie in [0,1]");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (bootstrap_resamples < 1) throw ConfigError("bootstrap_resamples must be >= 1");
}

void ProviderSpec::validate() const {
  if (kind == ProviderKind::kRemote) {
    if (endpoint.empty()) throw ConfigError("remote provider needs an endpoint");
    if (top_k < 1) throw ConfigError("top_k must be >= 1");
    if (!(timeout_s > 0.0)) throw ConfigError("timeout must be > 0");
  } else if (path.empty()) {
    throw ConfigError(to_string(kind) + " provider needs a table path");
  }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || p.empty() ? path : base_dir / path;
  };
  try {
    ExperimentConfig cfg;
    if (j.contains("dataset")) cfg.dataset = resolve(j.at("dataset").get<std::string>());
    if (j.contains("provider")) {
      const auto& p = j.at("provider");
      cfg.provider.kind = provider_kind_from_string(p.value("kind", std::string("synthetic")));
      if (p.contains("path")) cfg.provider.path = resolve(p.at("path").get<std::string>());
      cfg.provider.endpoint = p.value("endpoint", std::string());
      cfg.provider.top_k = p.value("top_k", cfg.provider.top_k);
      cfg.provider.timeout_s = p.value("timeout_s", cfg.provider.timeout_s);
      cfg.provider.max_in_flight = p.value("max_in_flight", cfg.provider.max_in_flight);
      if (p.contains("vocab")) cfg.provider.vocab_path = resolve(p.at("vocab").get<std::string>());
      cfg.provider.vocab_size = p.value("vocab_size", cfg.provider.vocab_size);
      cfg.provider.eos_id = p.value("eos_id", cfg.provider.eos_id);
    }
    if (j.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& s : j.at("strategies")) cfg.strategies.push_back(strategy_from_string(s.get<std::string>()));
    }
    if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      cfg.noise.sigma = n.value("sigma", cfg.noise.sigma);
      cfg.noise.lambda = n.value("lambda", cfg.noise.lambda);
      if (n.contains("mode")) cfg.noise.mode = noise_mode_from_string(n.at("mode").get<std::string>());
    }
    cfg.delta = j.value("delta", cfg.delta);
    cfg.vcd_alpha = j.value("vcd_alpha", cfg.vcd_alpha);
    cfg.vcd_beta = j.value("vcd_beta", cfg.vcd_beta);
    cfg.max_len = j.value("max_len", cfg.max_len);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("out")) cfg.out_dir = resolve(j.at("out").get<std::string>());
    cfg.trace = j.value("trace", cfg.trace);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.bootstrap_resamples = j.value("bootstrap_resamples", cfg.bootstrap_resamples);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json ExperimentConfig::to_json() const {
  std::vector<std::string> names;
  for (Strategy s : strategies) names.push_back(vgs::to_string(s));
  nlohmann::json provider_json = {{"kind", vgs::to_string(provider.kind)}};
  if (provider.kind == ProviderKind::kRemote) {
    provider_json["endpoint"] = provider.endpoint;
    provider_json["top_k"] = provider.top_k;
    provider_json["timeout_s"] = provider.timeout_s;
  } else {
    provider_json["path"] = provider.path.string();
  }
  return {{"dataset", dataset.string()},
          {"provider", provider_json},
          {"strategies", names},
          {"alphas", alphas},
          {"noise", {{"sigma", noise.sigma}, {"lambda", noise.lambda}, {"mode", vgs::to_string(noise.mode)}}},
          {"delta", delta},
          {"vcd_alpha", vcd_alpha},
          {"vcd_beta", vcd_beta},
          {"max_len", max_len},
          {"seed", seed},
          {"bootstrap_resamples", bootstrap_resamples}};
}

namespace {

std::string format_alpha(double alpha) {
  std::ostringstream ss;
  ss << alpha;
  return ss.str();
}

}  // namespace

std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg) {
  std::set<Strategy> wanted(cfg.strategies.begin(), cfg.strategies.end());
  std::vector<RunSpec> runs{{"greedy", Strategy::kGreedy, std::nullopt}};
  if (wanted.contains(Strategy::kVcd)) runs.push_back({"vcd", Strategy::kVcd, std::nullopt});
  if (wanted.contains(Strategy::kVgs)) {
    std::vector<double> alphas = cfg.alphas;
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    for (double a : alphas) {
      runs.push_back({alphas.size() > 1 ? "vgs@" + format_alpha(a) : "vgs", Strategy::kVgs, a});
    }
  }
  return runs;
}

std::map<std::string, std::optional<Image>> load_dataset_images(const std::vector<VqaItem>& items,
                                                                const std::filesystem::path& dataset_path) {
  const auto base = dataset_path.parent_path();
  std::map<std::string, std::optional<Image>> images;
  for (const auto& item : items) {
    if (images.contains(item.image)) continue;
    try {
      images.emplace(item.image, load_image(base / item.image, item.image));
    } catch (const Error& e) {
      spdlog::error("image '{}' for item '{}' failed to load: {}", item.image, item.id, e.what());
      images.emplace(item.image, std::nullopt);
    }
  }
  return images;
}

std::unique_ptr<ModelProvider> make_provider(const ProviderSpec& spec,
                                             const std::map<std::string, std::optional<Image>>& images) {
  switch (spec.kind) {
    case ProviderKind::kScripted:
      return std::make_unique<ScriptedModel>(ScriptedModel::load(spec.path));
    case ProviderKind::kSynthetic: {
      auto model = std::make_unique<SyntheticModel>(SyntheticModelSpec::load(spec.path));
      for (const auto& [id, image] : images) {
        if (image) model->add_reference(*image);
      }
      return model;
    }
    case ProviderKind::kRemote: {
      Vocab vocab;
      if (!spec.vocab_path.empty()) {
        vocab = detail::vocab_from_json(nlohmann::json::parse(detail::read_text_file(spec.vocab_path)));
      } else {
        vocab = Vocab::placeholder(spec.vocab_size, spec.eos_id);
      }
      RemoteConfig rc;
      rc.endpoint = spec.endpoint;
      rc.top_k = spec.top_k;
      rc.options.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(spec.timeout_s * 1000.0));
      rc.max_in_flight = spec.max_in_flight;
      return std::make_unique<RemoteModel>(std::move(rc), std::move(vocab));
    }
  }
  throw ConfigError("unknown provider kind");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<VqaItem>& items,
                                const std::map<std::string, std::optional<Image>>& images,
                                const ModelProvider& provider) {
  cfg.validate();
  if (items.empty()) throw ConfigError("dataset has no items");

  // Deterministic item order regardless of file order.
  std::vector<const VqaItem*> ordered;
  for (const auto& item : items) ordered.push_back(&item);
  std::sort(ordered.begin(), ordered.end(), [](const VqaItem* a, const VqaItem* b) { return a->id < b->id; });

  const auto runs = plan_runs(cfg);
  unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(ordered.size()));

  ExperimentResult result;
  result.items = static_cast<std::int64_t>(ordered.size());
  std::set<std::string> failed;
  std::vector<std::string> trace_chunks(ordered.size());

  for (const auto& run : runs) {
    DecodeConfig dc;
    dc.strategy = run.strategy;
    dc.vgs = {run.alpha.value_or(cfg.alphas.front()), cfg.delta};
    dc.vcd_alpha = cfg.vcd_alpha;
    dc.vcd_beta = cfg.vcd_beta;
    dc.noise = cfg.noise;
    dc.max_len = cfg.max_len;

    std::vector<ItemRecord> records(ordered.size());
    std::vector<std::string> run_traces(ordered.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < ordered.size(); i = next.fetch_add(1)) {
        const VqaItem& item = *ordered[i];
        ItemRecord& rec = records[i];
        const auto img = images.find(item.image);
        if (img == images.end() || !img->second) {
          rec = {item.id, item.qtype, "", item.answer, 0.0, ItemStatus::kFailed, "image unavailable"};
          continue;
        }
        DecodeConfig item_cfg = dc;
        item_cfg.seed = derive_seed(cfg.seed, item.id);
        try {
          const auto out = run_decode(provider, *img->second, Query(item.question), item_cfg);
          rec = score_item(item, render_tokens(provider.vocab(), out.tokens));
          if (cfg.trace) {
            std::ostringstream ss;
            write_trace_jsonl(ss, out.trace, provider.vocab(), run.label);
            run_traces[i] = ss.str();
          }
        } catch (const Error& e) {
          spdlog::warn("item '{}' failed under {}: {}", item.id, run.label, e.what());
          rec = {item.id, item.qtype, "", item.answer, 0.0, ItemStatus::kFailed, e.what()};
          if (const auto* de = dynamic_cast<const DecodeError*>(&e); de && cfg.trace) {
            std::ostringstream ss;
            write_trace_jsonl(ss, de->partial_trace(), provider.vocab(), run.label);
            run_traces[i] = ss.str();
          }
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      if (records[i].status == ItemStatus::kFailed) failed.insert(records[i].id);
      trace_chunks[i] += run_traces[i];
    }
    result.reports.push_back(aggregate_report(run.label, to_string(run.strategy), run.alpha, std::move(records)));
    spdlog::info("{}: overall {:.4f} ({} open, {} closed, {} failed)", run.label, result.reports.back().overall,
                 result.reports.back().n_open, result.reports.back().n_closed, result.reports.back().n_failed);
  }

  const EvalReport& baseline = result.reports.front();
  for (std::size_t r = 1; r < result.reports.size(); ++r) {
    auto& report = result.reports[r];
    report.delta_vs_baseline = report.overall - baseline.overall;
    report.significance = compare_reports(baseline, report, cfg.bootstrap_resamples, cfg.seed);
  }
  result.failed_items = static_cast<std::int64_t>(failed.size());
  if (cfg.trace) {
    for (std::size_t i = 0; i < ordered.size(); ++i) result.traces.emplace(ordered[i]->id, std::move(trace_chunks[i]));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  cfg.provider.validate();
  const auto items = load_dataset(cfg.dataset);
  if (items.empty()) throw ConfigError("dataset " + cfg.dataset.string() + " has no items");
  const auto images = load_dataset_images(items, cfg.dataset);
  const auto provider = make_provider(cfg.provider, images);
  return run_experiment(cfg, items, images, *provider);
}

std::string render_text_report(const std::vector<EvalReport>& reports) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return std::string(buf);
  };
  auto pval = [](double p) {
    char buf[32];
    if (p < 0.001) return std::string("<0.001");
    std::snprintf(buf, sizeof(buf), "%.3f", p);
    return std::string(buf);
  };
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.label.size());

  std::ostringstream out;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                 const std::string& e, const std::string& f, const std::string& g) {
    out << std::left << std::setw(static_cast<int>(width)) << a << std::right << std::setw(9) << b
        << std::setw(9) << c << std::setw(9) << d << std::setw(9) << e << std::setw(12) << f << std::setw(10)
        << g << '\n';
  };
  row("Method", "Open", "Closed", "Overall", "Delta", "p(McNemar)", "p(boot)");
  for (const auto& r : reports) {
    std::string delta = "--", p_mc = "--", p_boot = "--";
    if (r.delta_vs_baseline) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%+.2f", 100.0 * *r.delta_vs_baseline);
      delta = buf;
    }
    if (r.significance) {
      if (r.n_closed > 0) p_mc = pval(r.significance->mcnemar_exact_p);
      if (r.significance->overall) p_boot = pval(r.significance->overall->p_value);
    }
    row(r.label, pct(r.open_recall), pct(r.closed_acc), pct(r.overall), delta, p_mc, p_boot);
  }
  return out.str();
}

nlohmann::json report_document(const std::vector<EvalReport>& reports, const ExperimentConfig& cfg,
                               const ExperimentResult& result) {
  nlohmann::json doc;
  doc["metadata"] = {{"config", cfg.to_json()},
                     {"items", result.items},
                     {"failed_items", result.failed_items}};
  doc["reports"] = reports;
  return doc;
}

std::vector<EvalReport> reports_from_document(const nlohmann::json& doc) {
  return doc.at("reports").get<std::vector<EvalReport>>();
}

namespace {

std::string safe_filename(const std::string& id) {
  std::string out;
  for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' ? c : '_');
  return out.empty() ? "_" : out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

void emit_report(const ExperimentResult& result, const ExperimentConfig& cfg,
                 const std::vector<ReportFormat>& formats) {
  if (result.reports.empty()) throw InvalidInput("no reports to emit");
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
  for (auto format : formats) {
    if (format == ReportFormat::kJson) {
      write_file(cfg.out_dir / "report.json", report_document(result.reports, cfg, result).dump(2) + "\n");
    } else {
      write_file(cfg.out_dir / "report.txt", render_text_report(result.reports));
    }
  }
  if (!result.traces.empty()) {
    const auto dir = cfg.out_dir / "traces";
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create trace directory " + dir.string() + ": " + ec.message());
    for (const auto& [id, jsonl] : result.traces) write_file(dir / (safe_filename(id) + ".jsonl"), jsonl);
  }
}

}  // namespace vgs
