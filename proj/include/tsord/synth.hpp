#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsord/dataset.hpp"

namespace tsord {

/// Recipe for a synthetic ordinal series problem. Each instance draws a class
/// from `class_weights` (uniform when empty), places a latent level inside
/// that class's band, and renders a smooth bump-plus-wave series whose
/// amplitude, width and drift follow the latent level, with additive
/// autoregressive noise. Classes are therefore recoverable and genuinely
/// ordered.
struct SynthConfig {
  std::string name = "synthetic";
  int train_size = 60;
  int test_size = 30;
  int length = 64;
  int channels = 1;
  int classes = 3;
  double noise = 0.3;
  std::vector<double> class_weights;
  std::uint64_t seed = 1;
};

OrdinalDataset make_synthetic(const SynthConfig& config, int size, std::uint64_t stream);
SplitPair make_synthetic_split(const SynthConfig& config);

}  // namespace tsord
