#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsord/rng.hpp"
#include "tsord/transform.hpp"

namespace tsord {

using detail::TapWorkspace;

int ConvPlan::slots_per_kernel() const {
  int n = 0;
  for (const int q : quantiles_per_dilation) n += q;
  return n;
}

ConvPlan ConvPlan::fit(const OrdinalDataset& train, bool first_difference, int features_per_kernel,
                       std::uint64_t seed, std::uint64_t stream_tag) {
  const int rep_length = static_cast<int>(train.length()) - (first_difference ? 1 : 0);
  if (rep_length < 9) throw std::invalid_argument("minirocket: series too short (need 9 points)");
  const int num_channels = static_cast<int>(train.num_channels());

  ConvPlan plan;
  plan.series_length = rep_length;
  plan.num_channels = num_channels;
  plan.first_difference = first_difference;
  detail::plan_dilations(rep_length, features_per_kernel, plan.dilations, plan.quantiles_per_dilation);

  if (num_channels > 1) plan.channel_subsets.resize(plan.dilations.size() * 84);
  plan.biases.reserve(static_cast<std::size_t>(features_per_kernel) * 84);

  TapWorkspace ws;
  std::vector<double> z;
  int global_quantile = 0;
  for (std::size_t di = 0; di < plan.dilations.size(); ++di) {
    const int d = plan.dilations[di];
    const int count = plan.quantiles_per_dilation[di];
    for (int k = 0; k < 84; ++k) {
      Rng rng(seed, stream_tag, di, static_cast<std::uint64_t>(k));

      std::vector<int> channels = {0};
      if (num_channels > 1) {
        const int size = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_channels)));
        std::vector<int> all(static_cast<std::size_t>(num_channels));
        for (int c = 0; c < num_channels; ++c) all[static_cast<std::size_t>(c)] = c;
        rng.shuffle(all);
        all.resize(static_cast<std::size_t>(size));
        std::sort(all.begin(), all.end());
        plan.channel_subsets[di * 84 + static_cast<std::size_t>(k)] = all;
        channels = std::move(all);
      }

      // Biases are quantiles of this slot's convolution output on one
      // training instance, over the same window the transform will pool.
      const std::size_t pick = static_cast<std::size_t>(rng.next_below(train.size()));
      detail::build_taps(train.instances[pick], first_difference, d, ws);
      detail::kernel_convolution(ws, k, channels, z);

      const bool padded = (static_cast<int>(di) + k) % 2 == 0;
      const int lo = padded ? 0 : 4 * d;
      const int hi = padded ? rep_length : rep_length - 4 * d;
      std::vector<double> window(z.begin() + lo, z.begin() + hi);

      for (int q = 0; q < count; ++q) {
        plan.biases.push_back(detail::quantile(window, detail::quantile_position(global_quantile)));
        ++global_quantile;
      }
    }
  }
  return plan;
}

MiniRocketTransform MiniRocketTransform::fit(const OrdinalDataset& train, const TransformConfig& config) {
  const int features_per_kernel = std::max(1, config.feature_budget() / 84);
  MiniRocketTransform t;
  t.plan = ConvPlan::fit(train, false, features_per_kernel, config.seed, 0);
  return t;
}

FeatureMatrix MiniRocketTransform::apply(const OrdinalDataset& ds) const {
  const ConvPlan& p = plan;
  if (static_cast<int>(ds.length()) != p.series_length || static_cast<int>(ds.num_channels()) != p.num_channels) {
    throw std::invalid_argument("minirocket: dataset shape differs from the fitted shape");
  }
  const std::size_t n = ds.size();
  const std::size_t f = 84 * static_cast<std::size_t>(p.slots_per_kernel());

  FeatureMatrix fm;
  fm.values = Matrix(n, f);
  fm.columns.resize(f);

  // Column layout: dilation-major, then kernel, then quantile.
  std::size_t col = 0;
  for (std::size_t di = 0; di < p.dilations.size(); ++di) {
    const int count = p.quantiles_per_dilation[di];
    for (int k = 0; k < 84; ++k) {
      const bool padded = (static_cast<int>(di) + k) % 2 == 0;
      for (int q = 0; q < count; ++q, ++col) {
        ColumnMeta& m = fm.columns[col];
        m.op = "ppv";
        m.kernel = k;
        m.dilation = p.dilations[di];
        m.padded = padded;
        m.representation = 0;
        m.bias = p.biases[col];
      }
    }
  }

#pragma omp parallel
  {
    TapWorkspace ws;
    std::vector<double> z;
    const std::vector<int> single = {0};
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(n); ++i) {
      double* row = fm.values.row(static_cast<std::size_t>(i)).data();
      std::size_t c = 0;
      for (std::size_t di = 0; di < p.dilations.size(); ++di) {
        const int d = p.dilations[di];
        const int count = p.quantiles_per_dilation[di];
        detail::build_taps(ds.instances[static_cast<std::size_t>(i)], p.first_difference, d, ws);
        for (int k = 0; k < 84; ++k) {
          const std::vector<int>& channels =
              p.channel_subsets.empty() ? single : p.channel_subsets[di * 84 + static_cast<std::size_t>(k)];
          detail::kernel_convolution(ws, k, channels, z);
          const bool padded = (static_cast<int>(di) + k) % 2 == 0;
          const int lo = padded ? 0 : 4 * d;
          const int hi = padded ? p.series_length : p.series_length - 4 * d;
          const double inv_len = 1.0 / (hi - lo);
          for (int q = 0; q < count; ++q, ++c) {
            const double bias = p.biases[c];
            long positive = 0;
            for (int j = lo; j < hi; ++j) positive += z[static_cast<std::size_t>(j)] > bias;
            row[c] = static_cast<double>(positive) * inv_len;
          }
        }
      }
    }
  }
  return fm;
}

}  // namespace tsord
