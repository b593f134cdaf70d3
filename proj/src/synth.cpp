#include "tsord/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsord/rng.hpp"

namespace tsord {

OrdinalDataset make_synthetic(const SynthConfig& config, int size, std::uint64_t stream) {
  if (config.classes < 2) throw std::invalid_argument("make_synthetic: need at least two classes");
  if (size < config.classes) {
    throw std::invalid_argument("make_synthetic: need at least one instance per class");
  }
  if (!config.class_weights.empty() &&
      static_cast<int>(config.class_weights.size()) != config.classes) {
    throw std::invalid_argument("make_synthetic: class_weights size mismatch");
  }

  std::vector<double> cumulative(static_cast<std::size_t>(config.classes));
  {
    double total = 0.0;
    for (int c = 0; c < config.classes; ++c) {
      total += config.class_weights.empty() ? 1.0 : config.class_weights[static_cast<std::size_t>(c)];
      cumulative[static_cast<std::size_t>(c)] = total;
    }
    for (double& v : cumulative) v /= total;
  }

  OrdinalDataset ds;
  ds.name = config.name;
  for (int c = 1; c <= config.classes; ++c) ds.class_names.push_back(std::to_string(c));

  const int t_len = config.length;
  const double tau = 6.283185307179586;
  for (int i = 0; i < size; ++i) {
    Rng rng(hash64(config.name), config.seed, stream, static_cast<std::uint64_t>(i));

    const double u = rng.next_double();
    int label = config.classes;
    for (int c = 0; c < config.classes; ++c) {
      if (u <= cumulative[static_cast<std::size_t>(c)]) {
        label = c + 1;
        break;
      }
    }
    // Latent level inside the class band; bands touch, so adjacent classes
    // stay harder to separate than distant ones. The level deforms the shape
    // monotonically (amplitude, width, drift) at a fixed location, the way an
    // outline grows with age rather than moving around.
    const double level = (label - 1 + rng.uniform(0.1, 0.9)) / config.classes;

    TimeSeriesInstance inst;
    inst.channels.resize(static_cast<std::size_t>(config.channels));
    for (int ch = 0; ch < config.channels; ++ch) {
      const double mix = 0.6 + 0.4 * std::cos(tau * ch / std::max(1, config.channels));
      const double phase = rng.uniform(-0.3, 0.3);
      const double width = 0.10 + 0.08 * level;
      auto& s = inst.channels[static_cast<std::size_t>(ch)];
      s.resize(static_cast<std::size_t>(t_len));
      double ar = 0.0;
      for (int t = 0; t < t_len; ++t) {
        const double x = static_cast<double>(t) / (t_len - 1);
        const double bump = (0.4 + 1.6 * level) * std::exp(-0.5 * std::pow((x - 0.45) / width, 2));
        const double wave = 0.25 * std::sin(tau * (2.0 * x) + phase);
        ar = 0.7 * ar + config.noise * rng.normal();
        s[static_cast<std::size_t>(t)] = mix * (bump + wave + 0.4 * level * x) + ar;
      }
    }
    ds.instances.push_back(std::move(inst));
    ds.labels.push_back(label);
  }

  // Every class must appear at least once; sizes used in practice make this
  // nearly certain, but patch deterministically if sampling left a gap:
  // relabel one instance of the currently most populous class.
  std::vector<long> counts = ds.class_counts();
  for (int c = 0; c < config.classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] != 0) continue;
    const std::size_t donor = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
      if (static_cast<std::size_t>(ds.labels[i] - 1) == donor) {
        ds.labels[i] = c + 1;
        counts[donor]--;
        counts[static_cast<std::size_t>(c)]++;
        break;
      }
    }
  }

  ds.validate();
  return ds;
}

SplitPair make_synthetic_split(const SynthConfig& config) {
  SplitPair split;
  split.train = make_synthetic(config, config.train_size, 0);
  split.test = make_synthetic(config, config.test_size, 1);
  split.resample_id = 0;
  split.seed = config.seed;
  return split;
}

}  // namespace tsord
