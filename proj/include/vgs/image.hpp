// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>

namespace vgs {

/// Row-major intensity grid with values in [0,1].
///
/// `id` names the clean source image; distortion keeps the id and sets
/// `distorted()` so providers can tell the two views apart.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, Eigen::ArrayXd pixels, std::string id = {},
        bool distorted = false);

  static Image constant(int width, int height, int channels, double value, std::string id = {});

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  Eigen::Index pixel_count() const { return pixels_.size(); }
  const Eigen::ArrayXd& pixels() const { return pixels_; }
  const std::string& id() const { return id_; }
  bool distorted() const { return distorted_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  Eigen::ArrayXd pixels_;
  std::string id_;
  bool distorted_ = false;
};

enum class NoiseMode {
  kShot,     // mean-zero signal-dependent Poisson term scaled by 1/lambda
  kLiteral,  // raw Poisson(lambda) counts added to intensities
};

struct NoiseParams {
  double sigma = 0.07;
  // Infinity disables the Poisson term in shot mode.
  double lambda = 70.0;
  NoiseMode mode = NoiseMode::kShot;
  std::uint64_t seed = 0;

  static NoiseParams identity() {
    return {0.0, std::numeric_limits<double>::infinity(), NoiseMode::kShot, 0};
  }

  // Throws ConfigError.
  void validate() const;
};

std::string to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& name);

// V' = clamp(V + N(0, sigma^2) + poisson term, 0, 1); deterministic in p.seed.
Image distort(const Image& image, const NoiseParams& params);

// Root-mean-square pixel difference.
double noise_energy(const Image& a, const Image& b);

}  // namespace vgs
