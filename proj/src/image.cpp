// Copyright 2026 The VGS Decoding Authors
// SPDX-License-Identifier: Apache-2.0

#include "vgs/image.hpp"

#include <cmath>
#include <random>

#include "vgs/errors.hpp"

namespace vgs {

Image::Image(int width, int height, int channels, Eigen::ArrayXd pixels, std::string id,
             bool distorted)
    : width_(width),
      height_(height),
      channels_(channels),
      pixels_(std::move(pixels)),
      id_(std::move(id)),
      distorted_(distorted) {
  if (width_ <= 0 || height_ <= 0 || channels_ <= 0) {
    throw InvalidInput("image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<Eigen::Index>(width_) * height_ * channels_) {
    throw InvalidInput("pixel count does not match width*height*channels");
  }
  if (!pixels_.allFinite() || (pixels_ < 0.0).any() || (pixels_ > 1.0).any()) {
    throw InvalidInput("pixel intensities must lie in [0,1]");
  }
}

Image Image::constant(int width, int height, int channels, double value, std::string id) {
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height * channels;
  return Image(width, height, channels, Eigen::ArrayXd::Constant(n, value), std::move(id));
}

void NoiseParams::validate() const {
  if (!std::isfinite(sigma) || sigma < 0.0) throw ConfigError("noise sigma must be finite and >= 0");
  if (std::isnan(lambda) || !(lambda > 0.0)) throw ConfigError("noise lambda must be > 0");
  if (mode == NoiseMode::kLiteral && !std::isfinite(lambda)) {
    throw ConfigError("literal noise mode needs a finite lambda");
  }
}

std::string to_string(NoiseMode mode) {
  return mode == NoiseMode::kShot ? "shot" : "literal";
}

NoiseMode noise_mode_from_string(const std::string& name) {
  if (name == "shot") return NoiseMode::kShot;
  if (name == "literal") return NoiseMode::kLiteral;
  throw ConfigError("unknown noise mode '" + name + "'");
}

Image distort(const Image& image, const NoiseParams& params) {
  params.validate();
  std::mt19937_64 gen(params.seed);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  const bool poisson_on = std::isfinite(params.lambda);

  const Eigen::ArrayXd& v = image.pixels();
  Eigen::ArrayXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v[i];
    if (params.sigma > 0.0) x += params.sigma * gaussian(gen);
    if (poisson_on) {
      if (params.mode == NoiseMode::kShot) {
        const double mean = params.lambda * v[i];
        if (mean > 0.0) {
          std::poisson_distribution<long long> counts(mean);
          x += (static_cast<double>(counts(gen)) - mean) / params.lambda;
        }
      } else {
        std::poisson_distribution<long long> counts(params.lambda);
        x += static_cast<double>(counts(gen));
      }
    }
    out[i] = std::clamp(x, 0.0, 1.0);
  }
  return Image(image.width(), image.height(), image.channels(), std::move(out), image.id(), true);
}

double noise_energy(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw InvalidInput("noise_energy: image dimensions differ");
  return std::sqrt((a.pixels() - b.pixels()).square().mean());
}

}  // namespace vgs
