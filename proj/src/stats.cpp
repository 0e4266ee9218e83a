// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "vgs/errors.hpp"

namespace vgs {

void PairedOutcomes::validate() const {
  if (n00 < 0 || n01 < 0 || n10 < 0 || n11 < 0) throw InvalidInput("paired outcome counts must be >= 0");
  if (n00 + n01 + n10 + n11 == 0) throw InvalidInput("paired outcomes are empty");
}

PairedOutcomes PairedOutcomes::tally(std::span<const bool> a_correct, std::span<const bool> b_correct) {
  if (a_correct.size() != b_correct.size()) throw InvalidInput("paired outcome lengths differ");
  PairedOutcomes po;
  for (std::size_t i = 0; i < a_correct.size(); ++i) {
    if (a_correct[i]) {
      (b_correct[i] ? po.n11 : po.n10)++;
    } else {
      (b_correct[i] ? po.n01 : po.n00)++;
    }
  }
  return po;
}

double mcnemar_exact(const PairedOutcomes& outcomes) {
  outcomes.validate();
  const std::int64_t b = outcomes.n01;
  const std::int64_t c = outcomes.n10;
  const std::int64_t n = b + c;
  if (n == 0) return 1.0;
  const std::int64_t m = std::min(b, c);
  // log C(n,k) - n log 2 summed with log-sum-exp so large n stays finite.
  const double log_norm = std::lgamma(static_cast<double>(n) + 1.0) - static_cast<double>(n) * std::log(2.0);
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(m + 1));
  for (std::int64_t k = 0; k <= m; ++k) {
    logs.push_back(log_norm - std::lgamma(static_cast<double>(k) + 1.0) -
                   std::lgamma(static_cast<double>(n - k) + 1.0));
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return std::min(1.0, 2.0 * std::exp(top) * acc);
}

double mcnemar_chi2(const PairedOutcomes& outcomes) {
  outcomes.validate();
  const double b = static_cast<double>(outcomes.n01);
  const double c = static_cast<double>(outcomes.n10);
  if (b + c == 0.0) return 1.0;
  const double corrected = std::max(0.0, std::abs(b - c) - 1.0);
  const double statistic = corrected * corrected / (b + c);
  return std::erfc(std::sqrt(statistic / 2.0));
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapResult bootstrap_delta(std::span<const double> a, std::span<const double> b, int n_resamples,
                                std::uint64_t seed, unsigned threads) {
  if (a.size() != b.size()) throw InvalidInput("bootstrap inputs differ in length");
  if (a.size() < 2) throw InvalidInput("bootstrap needs at least two paired items");
  if (n_resamples < 1) throw InvalidInput("bootstrap needs at least one resample");

  const std::size_t n = a.size();
  BootstrapResult result;
  result.n_resamples = n_resamples;
  result.seed = seed;
  result.observed = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n) -
                    std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);

  std::vector<double> stats(static_cast<std::size_t>(n_resamples));
  auto work = [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(r)};
      std::mt19937_64 gen(seq);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      double sa = 0.0, sb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = pick(gen);
        sa += a[j];
        sb += b[j];
      }
      stats[static_cast<std::size_t>(r)] = sb / static_cast<double>(n) - sa / static_cast<double>(n);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_resamples));
  {
    std::vector<std::jthread> pool;
    const int chunk = (n_resamples + static_cast<int>(threads) - 1) / static_cast<int>(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const int begin = static_cast<int>(t) * chunk;
      const int end = std::min(n_resamples, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }

  if (result.observed == 0.0) {
    result.p_value = 1.0;
  } else {
    const double sign = result.observed > 0.0 ? 1.0 : -1.0;
    const auto opposed = std::count_if(stats.begin(), stats.end(), [&](double s) { return s * sign <= 0.0; });
    result.p_value = std::min(1.0, 2.0 * static_cast<double>(opposed) / static_cast<double>(n_resamples));
  }
  std::sort(stats.begin(), stats.end());
  result.ci_low = percentile_sorted(stats, 0.025);
  result.ci_high = percentile_sorted(stats, 0.975);
  return result;
}

}  // namespace vgs
