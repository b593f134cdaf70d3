#include <stdexcept>

#include "tsord/transform.hpp"

namespace tsord {

using detail::TapWorkspace;

MultiRocketTransform MultiRocketTransform::fit(const OrdinalDataset& train,
                                               const TransformConfig& config) {
  if (train.length() < 10) {
    throw std::invalid_argument("multirocket: series too short (need 10 points)");
  }
  // Budget split evenly over 2 representations x 4 pooling ops x 84 kernels.
  const int features_per_kernel = std::max(1, config.feature_budget() / (2 * 4 * 84));
  MultiRocketTransform t;
  t.base = ConvPlan::fit(train, false, features_per_kernel, config.seed, 0);
  t.diff = ConvPlan::fit(train, true, features_per_kernel, config.seed, 1);
  return t;
}

namespace {

void apply_plan(const ConvPlan& p, const OrdinalDataset& ds, int representation,
                std::size_t col_offset, FeatureMatrix& fm) {
  const std::size_t n = ds.size();

  std::size_t col = col_offset;
  for (std::size_t di = 0; di < p.dilations.size(); ++di) {
    const int count = p.quantiles_per_dilation[di];
    for (int k = 0; k < 84; ++k) {
      const bool padded = (static_cast<int>(di) + k) % 2 == 0;
      std::size_t bias_idx = (col - col_offset) / 4;
      for (int q = 0; q < count; ++q, ++bias_idx) {
        static const char* ops[4] = {"ppv", "mpv", "mipv", "lspv"};
        for (int op = 0; op < 4; ++op, ++col) {
          ColumnMeta& m = fm.columns[col];
          m.op = ops[op];
          m.kernel = k;
          m.dilation = p.dilations[di];
          m.padded = padded;
          m.representation = representation;
          m.bias = p.biases[bias_idx];
        }
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
      std::size_t c = col_offset;
      std::size_t bias_idx = 0;
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
          for (int q = 0; q < count; ++q, ++bias_idx) {
            const double bias = p.biases[bias_idx];
            // One pass per bias collects all four pooled statistics.
            long positives = 0;
            double positive_sum = 0.0;
            double index_sum = 0.0;
            long run = 0, longest = 0;
            for (int j = lo; j < hi; ++j) {
              const double v = z[static_cast<std::size_t>(j)] - bias;
              if (v > 0.0) {
                ++positives;
                positive_sum += v;
                index_sum += static_cast<double>(j - lo);
                ++run;
                if (run > longest) longest = run;
              } else {
                run = 0;
              }
            }
            const double len = static_cast<double>(hi - lo);
            row[c++] = static_cast<double>(positives) / len;
            row[c++] = positives ? positive_sum / static_cast<double>(positives) : 0.0;
            row[c++] = positives ? index_sum / static_cast<double>(positives) : -1.0;
            row[c++] = static_cast<double>(longest);
          }
        }
      }
    }
  }
}

}  // namespace

FeatureMatrix MultiRocketTransform::apply(const OrdinalDataset& ds) const {
  if (static_cast<int>(ds.length()) != base.series_length ||
      static_cast<int>(ds.num_channels()) != base.num_channels) {
    throw std::invalid_argument("multirocket: dataset shape differs from the fitted shape");
  }
  const std::size_t per_rep = 4 * 84 * static_cast<std::size_t>(base.slots_per_kernel());
  FeatureMatrix fm;
  fm.values = Matrix(ds.size(), 2 * per_rep);
  fm.columns.resize(2 * per_rep);
  apply_plan(base, ds, 0, 0, fm);
  apply_plan(diff, ds, 1, per_rep, fm);
  return fm;
}

}  // namespace tsord
