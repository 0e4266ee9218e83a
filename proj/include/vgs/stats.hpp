// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vgs {

// Paired binary outcomes for methods A and B on a shared item set.
struct PairedOutcomes {
  std::int64_t n00 = 0;  // both wrong
  std::int64_t n01 = 0;  // A wrong, B right
  std::int64_t n10 = 0;  // A right, B wrong
  std::int64_t n11 = 0;  // both right

  void validate() const;
  static PairedOutcomes tally(std::span<const bool> a_correct, std::span<const bool> b_correct);
};

// Exact two-sided binomial McNemar p-value on the discordant counts.
double mcnemar_exact(const PairedOutcomes& outcomes);

// Chi-square with continuity correction, one degree of freedom. Cross-check only.
double mcnemar_chi2(const PairedOutcomes& outcomes);

struct BootstrapResult {
  double observed = 0.0;  // mean(b) - mean(a)
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_resamples = 10000;
  std::uint64_t seed = 0;

  friend bool operator==(const BootstrapResult&, const BootstrapResult&) = default;
};

inline constexpr int kDefaultBootstrapResamples = 10000;

/// Paired bootstrap over item indices for the statistic mean(b) - mean(a).
///
/// Resample r draws its indices from a generator seeded by (seed, r), so the
/// result does not depend on `threads`. The CI is the [2.5, 97.5] percentile
/// band; the p-value is twice the fraction of resamples whose statistic does
/// not share the observed sign, capped at 1.
BootstrapResult bootstrap_delta(std::span<const double> a, std::span<const double> b,
                                int n_resamples = kDefaultBootstrapResamples, std::uint64_t seed = 0,
                                unsigned threads = 0);

// Linear-interpolated percentile (q in [0,1]) of sorted data.
double percentile_sorted(std::span<const double> sorted, double q);

}  // namespace vgs
