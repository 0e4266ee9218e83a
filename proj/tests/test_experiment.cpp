// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "vgs/benchmark.hpp"
#include "vgs/cli.hpp"
#include "vgs/experiment.hpp"
#include "vgs/image_io.hpp"

using namespace vgs;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vgs-decode");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Fresh scratch directory per test, removed afterwards.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("vgs_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

// A 50-episode synthetic benchmark under `dir`.
void make_bench(const fs::path& dir, int episodes = 50) {
  REQUIRE(run_cli({"make-synthetic", "--out", dir.string(), "--episodes", std::to_string(episodes)}) == kExitOk);
}

const nlohmann::json& report_by_label(const nlohmann::json& doc, const std::string& label) {
  for (const auto& r : doc.at("reports")) {
    if (r.at("label") == label) return r;
  }
  FAIL("no report labelled " << label);
  static const nlohmann::json empty;
  return empty;
}

}  // namespace

TEST_CASE("two strategies give two reports with delta bookkeeping") {
  Scratch s("two_reports");
  make_bench(s.dir);
  const auto out = s.dir / "run";
  REQUIRE(run_cli({"--config", (s.dir / "config.json").string(), "--strategy", "greedy", "--strategy", "vgs",
                   "--out", out.string(), "--bootstrap-resamples", "500"}) == kExitOk);
  const auto doc = load_json(out / "report.json");
  REQUIRE(doc["reports"].size() == 2);
  const auto& greedy = report_by_label(doc, "greedy");
  const auto& vgs = report_by_label(doc, "vgs");
  CHECK(greedy["delta_vs_baseline"].is_null());
  CHECK(vgs["delta_vs_baseline"].get<double>() == vgs["overall"].get<double>() - greedy["overall"].get<double>());
  CHECK(doc["metadata"]["items"] == 50);
  CHECK(doc["metadata"]["failed_items"] == 0);

  const auto reports = reports_from_document(doc);
  CHECK(nlohmann::json(reports).dump() == doc["reports"].dump());

  const auto text = slurp(out / "report.txt");
  CHECK(text.find("Method") == 0);
  CHECK(text.find("greedy") != std::string::npos);
  CHECK(!fs::exists(out / "traces"));
}

TEST_CASE("repeatable alpha flags sweep in one run") {
  Scratch s("sweep");
  make_bench(s.dir);
  const auto out = s.dir / "run";
  REQUIRE(run_cli({"--config", (s.dir / "config.json").string(), "--strategy", "vgs", "--alpha", "0",
                   "--alpha", "0.5", "--alpha", "1.0", "--alpha", "1.5", "--alpha", "2.0", "--out", out.string(),
                   "--format", "json", "--bootstrap-resamples", "200"}) == kExitOk);
  const auto doc = load_json(out / "report.json");
  REQUIRE(doc["reports"].size() == 6);
  int vgs_reports = 0;
  for (const auto& r : doc["reports"]) vgs_reports += r["strategy"] == "vgs";
  CHECK(vgs_reports == 5);
  CHECK(!fs::exists(out / "report.txt"));
  // alpha = 0 reproduces greedy exactly.
  const auto& zero = doc["reports"][1];
  CHECK(zero["alpha"] == 0.0);
  CHECK(zero["overall"] == doc["reports"][0]["overall"]);
  CHECK(zero["delta_vs_baseline"] == 0.0);
}

TEST_CASE("reports are byte-identical across reruns and independent of worker count") {
  Scratch s("determinism");
  make_bench(s.dir);
  const auto out = s.dir / "run";
  const std::vector<std::string> base{"--config", (s.dir / "config.json").string(), "--out", out.string(),
                                      "--format", "json", "--bootstrap-resamples", "300"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  REQUIRE(run_cli(with({"--workers", "1"})) == kExitOk);
  const auto first = slurp(out / "report.json");
  REQUIRE(run_cli(with({"--workers", "1"})) == kExitOk);
  CHECK(slurp(out / "report.json") == first);

  REQUIRE(run_cli(with({"--workers", "7"})) == kExitOk);
  CHECK(load_json(out / "report.json")["reports"].dump() == nlohmann::json::parse(first)["reports"].dump());
}

TEST_CASE("strategy order does not change per-strategy metrics") {
  Scratch s("reorder");
  make_bench(s.dir);
  const auto a = s.dir / "a", b = s.dir / "b";
  const auto cfg = (s.dir / "config.json").string();
  REQUIRE(run_cli({"--config", cfg, "--strategy", "greedy", "--strategy", "vcd", "--strategy", "vgs", "--out",
                   a.string(), "--format", "json", "--bootstrap-resamples", "200"}) == kExitOk);
  REQUIRE(run_cli({"--config", cfg, "--strategy", "vgs", "--strategy", "vcd", "--strategy", "greedy", "--out",
                   b.string(), "--format", "json", "--bootstrap-resamples", "200"}) == kExitOk);
  const auto da = load_json(a / "report.json"), db = load_json(b / "report.json");
  for (const char* label : {"greedy", "vcd", "vgs"}) {
    CHECK(report_by_label(da, label).dump() == report_by_label(db, label).dump());
  }
}

TEST_CASE("traces are written per item") {
  Scratch s("traces");
  make_bench(s.dir, 12);
  const auto out = s.dir / "run";
  REQUIRE(run_cli({"--config", (s.dir / "config.json").string(), "--strategy", "vgs", "--out", out.string(),
                   "--trace", "--bootstrap-resamples", "100"}) == kExitOk);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(out / "traces")) {
    ++files;
    std::istringstream in(slurp(entry.path()));
    std::string line;
    std::set<std::string> strategies;
    while (std::getline(in, line)) strategies.insert(nlohmann::json::parse(line)["strategy"].get<std::string>());
    CHECK(strategies == std::set<std::string>{"greedy", "vgs"});
  }
  CHECK(files == 12);
}

TEST_CASE("input errors exit with code 2") {
  Scratch s("input_errors");
  make_bench(s.dir, 4);
  { std::ofstream(s.dir / "empty.jsonl"); }
  const auto cfg = (s.dir / "config.json").string();
  CHECK(run_cli({"--config", cfg, "--dataset", (s.dir / "empty.jsonl").string(), "--out", (s.dir / "o").string()}) ==
        kExitInputError);
  CHECK(run_cli({"--config", cfg, "--dataset", (s.dir / "missing.jsonl").string(), "--out",
                 (s.dir / "o").string()}) == kExitInputError);
  CHECK(run_cli({"--config", (s.dir / "nope.json").string()}) == kExitInputError);
  CHECK(run_cli({"--config", cfg, "--strategy", "beam"}) == kExitInputError);
  CHECK(run_cli({"--config", cfg, "--delta", "2"}) == kExitInputError);
  // The output path is a regular file, so the report directory cannot be created.
  { std::ofstream(s.dir / "blocked") << "x"; }
  CHECK(run_cli({"--config", cfg, "--out", (s.dir / "blocked").string(), "--bootstrap-resamples", "50"}) ==
        kExitInputError);
}

TEST_CASE("missing images mark items failed and too many failures exit with code 3") {
  Scratch s("failures");
  make_bench(s.dir, 20);
  const auto cfg = (s.dir / "config.json").string();
  const auto out = s.dir / "run";
  // Two of twenty (10%) is tolerated.
  fs::remove(s.dir / "images" / "ep0000.f32");
  fs::remove(s.dir / "images" / "ep0001.f32");
  CHECK(run_cli({"--config", cfg, "--out", out.string(), "--format", "json", "--bootstrap-resamples", "50"}) ==
        kExitOk);
  auto doc = load_json(out / "report.json");
  CHECK(doc["metadata"]["failed_items"] == 2);
  CHECK(doc["reports"][0]["n_failed"] == 2);
  CHECK(doc["reports"][0]["n_open"].get<int>() + doc["reports"][0]["n_closed"].get<int>() == 18);

  fs::remove(s.dir / "images" / "ep0002.f32");
  CHECK(run_cli({"--config", cfg, "--out", out.string(), "--format", "json", "--bootstrap-resamples", "50"}) ==
        kExitTooManyFailures);
  doc = load_json(out / "report.json");
  CHECK(doc["metadata"]["failed_items"] == 3);
}

TEST_CASE("text report for a lone baseline") {
  EvalReport r;
  r.label = "greedy";
  r.strategy = "greedy";
  r.open_recall = 0.3445;
  r.closed_acc = 0.6892;
  r.overall = 0.5364;
  const auto text = render_text_report({r});
  std::istringstream in(text);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(!std::getline(in, extra));
  CHECK(header.find("Open") < header.find("Closed"));
  CHECK(header.find("Closed") < header.find("Overall"));
  CHECK(header.find("Overall") < header.find("Delta"));
  CHECK(row.find("34.45") != std::string::npos);
  CHECK(row.find("68.92") != std::string::npos);
  CHECK(row.find("53.64") != std::string::npos);
  CHECK(row.find("--") != std::string::npos);
}

TEST_CASE("plan_runs always leads with the greedy baseline") {
  ExperimentConfig cfg;
  cfg.strategies = {Strategy::kVgs, Strategy::kVcd};
  cfg.alphas = {1.5, 0.5, 1.5};
  const auto runs = plan_runs(cfg);
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].strategy == Strategy::kGreedy);
  CHECK(runs[1].strategy == Strategy::kVcd);
  CHECK(runs[2].alpha == 0.5);
  CHECK(runs[3].alpha == 1.5);
  CHECK(runs[2].label != runs[3].label);
}

TEST_CASE("scripted provider through the runner") {
  Scratch s("scripted");
  {
    std::ofstream(s.dir / "dataset.jsonl")
        << R"({"id": "q1", "image": "a.pgm", "question": "effusion?", "answer": "yes", "qtype": "closed"})" << '\n'
        << R"({"id": "q2", "image": "a.pgm", "question": "where?", "answer": "left lung", "qtype": "open"})" << '\n';
    std::ofstream(s.dir / "a.pgm") << "P2 2 2 255\n0 64 128 255\n";
    std::ofstream(s.dir / "table.json") << R"({
      "vocab": {"tokens": ["<eos>", "yes", "no", "left", "lung"], "eos_id": 0},
      "contexts": [
        {"image_id": "a.pgm", "prefix": [], "probs": [0.0, 0.2, 0.1, 0.7, 0.0]},
        {"image_id": "a.pgm", "prefix": [3], "probs": [0.1, 0.0, 0.0, 0.0, 0.9]},
        {"image_id": "a.pgm", "prefix": [3, 4], "probs": [1.0, 0.0, 0.0, 0.0, 0.0]}
      ]})";
  }
  const auto out = s.dir / "run";
  REQUIRE(run_cli({"--dataset", (s.dir / "dataset.jsonl").string(), "--provider", "scripted", "--provider-file",
                   (s.dir / "table.json").string(), "--strategy", "greedy", "--out", out.string(), "--format",
                   "json"}) == kExitOk);
  const auto doc = load_json(out / "report.json");
  const auto& greedy = doc["reports"][0];
  CHECK(greedy["open_recall"] == 1.0);
  CHECK(greedy["closed_acc"] == 0.0);
  CHECK(greedy["overall"] == 0.5);
}
