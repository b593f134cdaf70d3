#include "tsord/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsord/rng.hpp"

namespace tsord {

std::string_view to_string(TransformVariant v) {
  switch (v) {
    case TransformVariant::rocket: return "rocket";
    case TransformVariant::minirocket: return "minirocket";
    case TransformVariant::multirocket: return "multirocket";
  }
  return "?";
}

TransformVariant transform_variant_from_string(std::string_view s) {
  if (s == "rocket") return TransformVariant::rocket;
  if (s == "minirocket") return TransformVariant::minirocket;
  if (s == "multirocket") return TransformVariant::multirocket;
  throw std::invalid_argument("unknown transform variant: " + std::string(s));
}

int TransformConfig::feature_budget() const {
  if (num_features > 0) return num_features;
  return variant == TransformVariant::multirocket ? 50000 : 10000;
}

std::vector<Kernel> generate_rocket_kernels(int series_length, int num_kernels, int num_channels,
                                            std::uint64_t seed, bool center_weights) {
  if (series_length < 12) {
    throw std::invalid_argument("rocket: series too short for the longest kernel (need T >= 12)");
  }
  if (num_kernels < 1) throw std::invalid_argument("rocket: num_kernels must be >= 1");

  std::vector<Kernel> kernels(static_cast<std::size_t>(num_kernels));
  for (int k = 0; k < num_kernels; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    Kernel& kn = kernels[static_cast<std::size_t>(k)];

    const int n = 7 + 2 * static_cast<int>(rng.next_below(3));
    kn.weights.resize(static_cast<std::size_t>(n));
    double mean = 0.0;
    for (double& w : kn.weights) {
      w = rng.normal();
      mean += w;
    }
    mean /= n;
    if (center_weights) {
      for (double& w : kn.weights) w -= mean;
    }

    kn.bias = rng.uniform(-1.0, 1.0);

    const double max_exp = std::log2(static_cast<double>(series_length - 1) / (n - 1));
    kn.dilation = static_cast<int>(std::pow(2.0, rng.uniform(0.0, max_exp)));
    if (kn.dilation < 1) kn.dilation = 1;

    kn.padding = rng.next_double() < 0.5 ? ((n - 1) * kn.dilation) / 2 : 0;

    if (num_channels > 1) {
      const int size = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_channels)));
      std::vector<int> all(static_cast<std::size_t>(num_channels));
      for (int c = 0; c < num_channels; ++c) all[static_cast<std::size_t>(c)] = c;
      rng.shuffle(all);
      all.resize(static_cast<std::size_t>(size));
      std::sort(all.begin(), all.end());
      kn.channels = std::move(all);
    } else {
      kn.channels = {0};
    }
  }
  return kernels;
}

std::vector<double> convolve(std::span<const double> series, const Kernel& k) {
  const long t = static_cast<long>(series.size());
  const long n = k.length();
  const long reach = (n - 1) * k.dilation;
  const long out_len = t + 2 * k.padding - reach;
  if (out_len < 1) throw std::invalid_argument("convolve: kernel span exceeds padded length");

  std::vector<double> padded(static_cast<std::size_t>(t + 2 * k.padding), 0.0);
  std::copy(series.begin(), series.end(), padded.begin() + k.padding);

  std::vector<double> z(static_cast<std::size_t>(out_len));
  for (long j = 0; j < out_len; ++j) {
    double acc = k.bias;
    for (long w = 0; w < n; ++w) {
      acc += k.weights[static_cast<std::size_t>(w)] * padded[static_cast<std::size_t>(j + w * k.dilation)];
    }
    z[static_cast<std::size_t>(j)] = acc;
  }
  return z;
}

double ppv(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("ppv: empty input");
  long count = 0;
  for (const double v : z) count += v > 0.0;
  return static_cast<double>(count) / static_cast<double>(z.size());
}

double gmp(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("gmp: empty input");
  return *std::max_element(z.begin(), z.end());
}

double mpv(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("mpv: empty input");
  double sum = 0.0;
  long count = 0;
  for (const double v : z) {
    if (v > 0.0) {
      sum += v;
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

double mipv(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("mipv: empty input");
  double sum = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > 0.0) {
      sum += static_cast<double>(i);
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : -1.0;
}

double lspv(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("lspv: empty input");
  long best = 0, run = 0;
  for (const double v : z) {
    run = v > 0.0 ? run + 1 : 0;
    best = std::max(best, run);
  }
  return static_cast<double>(best);
}

const std::array<std::array<int, 3>, 84>& minirocket_kernel_positions() {
  static const auto table = [] {
    std::array<std::array<int, 3>, 84> t{};
    int idx = 0;
    for (int a = 0; a < 9; ++a) {
      for (int b = a + 1; b < 9; ++b) {
        for (int c = b + 1; c < 9; ++c) t[static_cast<std::size_t>(idx++)] = {a, b, c};
      }
    }
    return t;
  }();
  return table;
}

std::pair<FeatureMatrix, FeatureMatrix> rocket_transform(const OrdinalDataset& train,
                                                         const OrdinalDataset& test,
                                                         const TransformConfig& config) {
  const RocketTransform t = RocketTransform::fit(train, config);
  return {t.apply(train), t.apply(test)};
}

std::pair<FeatureMatrix, FeatureMatrix> minirocket_transform(const OrdinalDataset& train,
                                                             const OrdinalDataset& test,
                                                             const TransformConfig& config) {
  const MiniRocketTransform t = MiniRocketTransform::fit(train, config);
  return {t.apply(train), t.apply(test)};
}

std::pair<FeatureMatrix, FeatureMatrix> multirocket_transform(const OrdinalDataset& train,
                                                              const OrdinalDataset& test,
                                                              const TransformConfig& config) {
  const MultiRocketTransform t = MultiRocketTransform::fit(train, config);
  return {t.apply(train), t.apply(test)};
}

std::pair<FeatureMatrix, FeatureMatrix> apply_transform(const OrdinalDataset& train,
                                                        const OrdinalDataset& test,
                                                        const TransformConfig& config) {
  switch (config.variant) {
    case TransformVariant::rocket: return rocket_transform(train, test, config);
    case TransformVariant::minirocket: return minirocket_transform(train, test, config);
    case TransformVariant::multirocket: return multirocket_transform(train, test, config);
  }
  throw std::logic_error("unreachable");
}

namespace detail {

std::vector<double> first_difference(std::span<const double> series) {
  std::vector<double> d(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) d[i] = series[i + 1] - series[i];
  return d;
}

void plan_dilations(int series_length, int features_per_kernel, std::vector<int>& dilations,
                    std::vector<int>& quantiles_per_dilation) {
  const double max_exp = std::log2(static_cast<double>(series_length - 1) / 8.0);
  const int ladder = std::max(1, std::min(features_per_kernel, 32));

  dilations.clear();
  std::vector<int> raw_counts;
  for (int i = 0; i < ladder; ++i) {
    const double e = ladder == 1 ? 0.0 : max_exp * i / (ladder - 1);
    const int d = std::max(1, static_cast<int>(std::pow(2.0, e)));
    if (!dilations.empty() && dilations.back() == d) {
      ++raw_counts.back();
    } else {
      dilations.push_back(d);
      raw_counts.push_back(1);
    }
  }

  const double multiplier = static_cast<double>(features_per_kernel) / ladder;
  quantiles_per_dilation.resize(dilations.size());
  int assigned = 0;
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    quantiles_per_dilation[i] = static_cast<int>(raw_counts[i] * multiplier);
    assigned += quantiles_per_dilation[i];
  }
  for (std::size_t i = 0; assigned < features_per_kernel; i = (i + 1) % dilations.size()) {
    ++quantiles_per_dilation[i];
    ++assigned;
  }
}

double quantile_position(int g) {
  const double golden = 0.6180339887498949;
  const double p = std::fmod((g + 1) * golden, 1.0);
  return p > 0.0 ? p : golden;
}

double quantile(std::vector<double> sample, double position) {
  std::sort(sample.begin(), sample.end());
  const double pos = position * static_cast<double>(sample.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

void build_taps(const TimeSeriesInstance& inst, bool first_difference_rep, int dilation,
                TapWorkspace& ws) {
  const std::size_t c = inst.num_channels();
  const int len = static_cast<int>(inst.length()) - (first_difference_rep ? 1 : 0);
  const int pad = 4 * dilation;
  ws.length = len;
  ws.dilation = dilation;
  ws.padded.resize(c);
  ws.alpha.resize(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    auto& padded = ws.padded[ch];
    padded.assign(static_cast<std::size_t>(len + 2 * pad), 0.0);
    if (first_difference_rep) {
      const auto& s = inst.channels[ch];
      for (int i = 0; i < len; ++i) {
        padded[static_cast<std::size_t>(pad + i)] = s[static_cast<std::size_t>(i + 1)] - s[static_cast<std::size_t>(i)];
      }
    } else {
      std::copy(inst.channels[ch].begin(), inst.channels[ch].end(), padded.begin() + pad);
    }
    auto& alpha = ws.alpha[ch];
    alpha.assign(static_cast<std::size_t>(len), 0.0);
    for (int j = 0; j < len; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 9; ++k) acc += padded[static_cast<std::size_t>(j + k * dilation)];
      alpha[static_cast<std::size_t>(j)] = -acc;
    }
  }
}

void kernel_convolution(const TapWorkspace& ws, int kernel, std::span<const int> channels,
                        std::vector<double>& z) {
  const auto& pos = minirocket_kernel_positions()[static_cast<std::size_t>(kernel)];
  const int len = ws.length;
  const int d = ws.dilation;
  z.assign(static_cast<std::size_t>(len), 0.0);
  for (const int ch : channels) {
    const double* padded = ws.padded[static_cast<std::size_t>(ch)].data();
    const double* alpha = ws.alpha[static_cast<std::size_t>(ch)].data();
    const double* pa = padded + pos[0] * d;
    const double* pb = padded + pos[1] * d;
    const double* pc = padded + pos[2] * d;
    for (int j = 0; j < len; ++j) {
      z[static_cast<std::size_t>(j)] += alpha[j] + 3.0 * (pa[j] + pb[j] + pc[j]);
    }
  }
}

}  // namespace detail

}  // namespace tsord
