// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/remote_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"
#include "vgs/image_io.hpp"

namespace vgs {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;    // base path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  ep.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
  return ep;
}

BackendError schema_error(const std::string& what) {
  return BackendError(BackendError::Kind::kSchema, "remote schema violation: " + what, 1, false);
}

SparseDist parse_response(const std::string& body, int top_k, const Vocab* expected_vocab) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vocab_size") || !doc.contains("eos_id") || !doc.contains("entries")) {
    throw schema_error("response must carry vocab_size, eos_id and entries");
  }
  if (!doc["vocab_size"].is_number_integer() || !doc["eos_id"].is_number_integer() || !doc["entries"].is_array()) {
    throw schema_error("vocab_size/eos_id must be integers and entries an array");
  }
  const auto vocab_size = doc["vocab_size"].get<std::int64_t>();
  const auto eos_id = doc["eos_id"].get<std::int64_t>();
  if (vocab_size <= 0 || eos_id < 0 || eos_id >= vocab_size) throw schema_error("bad vocab_size/eos_id");
  if (expected_vocab && (vocab_size != expected_vocab->size() || eos_id != expected_vocab->eos())) {
    throw schema_error("vocab_size/eos_id disagree with the configured vocabulary");
  }
  const auto& entries = doc["entries"];
  if (static_cast<int>(entries.size()) > top_k) throw schema_error("more entries than top_k");

  SparseDist out;
  std::unordered_set<TokenId> seen;
  double total = 0.0;
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
      throw schema_error("entries must be [int, float] pairs");
    }
    const auto id = e[0].get<TokenId>();
    const auto p = e[1].get<double>();
    if (id < 0 || id >= vocab_size) throw schema_error("token id outside vocabulary");
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw schema_error("probability outside [0,1]");
    if (!seen.insert(id).second) throw schema_error("duplicate token id");
    total += p;
    out.push_back({id, p});
  }
  if (total > 1.0 + kSumTolerance) throw schema_error("probabilities sum to " + std::to_string(total));
  std::stable_sort(out.begin(), out.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.prob > b.prob || (a.prob == b.prob && a.token < b.token);
  });
  return out;
}

}  // namespace

SparseDist remote_distribution(const std::string& endpoint, const Image& image, const Query& query,
                               const Prefix& prefix, int top_k, const RemoteOptions& options,
                               const Vocab* expected_vocab) {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  const Endpoint ep = split_endpoint(endpoint);

  const auto png = encode_png(image);
  const nlohmann::json request = {
      {"image_b64", httplib::detail::base64_encode(std::string(png.begin(), png.end()))},
      {"query", query.text()},
      {"prefix", prefix},
      {"top_k", top_k}};
  const std::string body = request.dump();
  const std::string path = ep.path + "/v1/distribution";

  const auto timeout = options.timeout;
  const auto secs = static_cast<time_t>(timeout.count() / 1000);
  const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);

  const int max_attempts = 1 + std::max(0, options.transport_retries);
  for (int attempt = 1;; ++attempt) {
    httplib::Client client(ep.origin);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(path, body, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;

    if (!result) {
      const auto err = result.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             ((err == httplib::Error::Read || err == httplib::Error::Write) &&
                              elapsed >= timeout * 9 / 10);
      const auto kind = timed_out ? BackendError::Kind::kTimeout : BackendError::Kind::kTransport;
      const std::string what = (timed_out ? "remote request timed out: " : "remote transport failure: ") +
                               httplib::to_string(err);
      if (attempt < max_attempts) {
        spdlog::warn("{} (attempt {}/{}), retrying", what, attempt, max_attempts);
        continue;
      }
      throw BackendError(kind, what, attempt, true);
    }
    if (result->status >= 400) {
      throw BackendError(BackendError::Kind::kHttpStatus,
                         "remote returned HTTP " + std::to_string(result->status), attempt, false,
                         result->status);
    }
    try {
      return parse_response(result->body, top_k, expected_vocab);
    } catch (const BackendError& e) {
      throw BackendError(e.kind(), e.what(), attempt, false);
    }
  }
}

RemoteModel::RemoteModel(RemoteConfig config, Vocab vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  if (config_.endpoint.empty()) throw ConfigError("remote provider needs an endpoint");
  if (config_.top_k < 1) throw ConfigError("top_k must be >= 1");
  if (config_.max_in_flight < 1 || config_.max_in_flight > 1024) {
    throw ConfigError("max_in_flight must lie in [1, 1024]");
  }
  split_endpoint(config_.endpoint);
  in_flight_ = std::make_unique<std::counting_semaphore<1024>>(config_.max_in_flight);
}

SparseDist RemoteModel::sparse_distribution(const Image& image, const Query& query,
                                            const Prefix& prefix) const {
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<1024>* sem;
    ~Release() { sem->release(); }
  } release{in_flight_.get()};
  return remote_distribution(config_.endpoint, image, query, prefix, config_.top_k, config_.options, &vocab_);
}

ProbDist RemoteModel::distribution(const Image& image, const Query& query, const Prefix& prefix) const {
  return densify(sparse_distribution(image, query, prefix), vocab_.size(), config_.tail_floor);
}

}  // namespace vgs
