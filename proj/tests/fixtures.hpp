// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <initializer_list>

#include "vgs/image.hpp"
#include "vgs/prob.hpp"
#include "vgs/synthetic_model.hpp"

namespace vgs::testing {

inline LogitVec vec(std::initializer_list<double> xs) {
  LogitVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline ProbDist dist(std::initializer_list<double> xs) { return ProbDist(vec(xs)); }

// Hallucination fixture: prior favours token 0, the image favours token 1.
// g0 = 0.8 on the clean view; `decay` is chosen so that the given noise
// energy brings g down to 0.2. Any non-empty prefix ends in EOS.
inline SyntheticModelSpec hallucination_spec(double energy_at_g_0_2) {
  SyntheticModelSpec spec;
  spec.vocab = Vocab({"prior", "visual", "<eos>"}, 2);
  spec.g0 = 0.8;
  spec.decay = std::log(4.0) / energy_at_g_0_2;
  spec.prior.push_back({std::nullopt, {}, dist({0.8, 0.2, 0.0})});
  spec.prior.push_back({std::nullopt, {0}, dist({0.0, 0.0, 1.0})});
  spec.prior.push_back({std::nullopt, {1}, dist({0.0, 0.0, 1.0})});
  spec.visual.push_back({"img0", Prefix{}, dist({0.1, 0.9, 0.0})});
  spec.visual.push_back({"img0", std::nullopt, dist({0.0, 0.0, 1.0})});
  return spec;
}

inline Image grey_image(double value = 0.5, std::string id = "img0") {
  return Image::constant(64, 64, 1, value, std::move(id));
}

}  // namespace vgs::testing
