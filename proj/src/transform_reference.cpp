#include "tsord/transform_reference.hpp"

#include <vector>

namespace tsord::reference {

namespace {

// Direct dilated dot product at padded position j (kernel centered there),
// reading zeros outside the series.
double direct_convolution_at(const std::vector<std::vector<double>>& channels,
                             const std::vector<int>& subset, std::span<const double> weights,
                             bool first_difference, int dilation, int center) {
  const int n = static_cast<int>(weights.size());
  const int half = (n - 1) / 2;
  double acc = 0.0;
  for (const int c : subset) {
    const auto& s = channels[static_cast<std::size_t>(c)];
    const int len = static_cast<int>(s.size()) - (first_difference ? 1 : 0);
    for (int k = 0; k < n; ++k) {
      const int pos = center + (k - half) * dilation;
      if (pos < 0 || pos >= len) continue;
      const double v = first_difference
                           ? s[static_cast<std::size_t>(pos + 1)] - s[static_cast<std::size_t>(pos)]
                           : s[static_cast<std::size_t>(pos)];
      acc += weights[static_cast<std::size_t>(k)] * v;
    }
  }
  return acc;
}

std::vector<double> plan_weights(int kernel) {
  std::vector<double> w(9, -1.0);
  for (const int p : minirocket_kernel_positions()[static_cast<std::size_t>(kernel)]) {
    w[static_cast<std::size_t>(p)] = 2.0;
  }
  return w;
}

FeatureMatrix plan_apply(const ConvPlan& p, const OrdinalDataset& ds, bool multi_ops,
                         std::size_t col_offset, FeatureMatrix&& fm) {
  const std::vector<int> single = {0};

  for (std::size_t i = 0; i < ds.size(); ++i) {
    double* row = fm.values.row(i).data();
    std::size_t col = col_offset;
    std::size_t bias_idx = 0;
    for (std::size_t di = 0; di < p.dilations.size(); ++di) {
      const int d = p.dilations[di];
      const int count = p.quantiles_per_dilation[di];
      for (int k = 0; k < 84; ++k) {
        const std::vector<int>& channels =
            p.channel_subsets.empty() ? single : p.channel_subsets[di * 84 + static_cast<std::size_t>(k)];
        const std::vector<double> w = plan_weights(k);
        const bool padded = (static_cast<int>(di) + k) % 2 == 0;
        const int lo = padded ? 0 : 4 * d;
        const int hi = padded ? p.series_length : p.series_length - 4 * d;
        std::vector<double> z(static_cast<std::size_t>(hi - lo));
        for (int j = lo; j < hi; ++j) {
          z[static_cast<std::size_t>(j - lo)] =
              direct_convolution_at(ds.instances[i].channels, channels, w, p.first_difference, d, j);
        }
        for (int q = 0; q < count; ++q, ++bias_idx) {
          std::vector<double> shifted(z.size());
          for (std::size_t j = 0; j < z.size(); ++j) shifted[j] = z[j] - p.biases[bias_idx];
          row[col++] = ppv(shifted);
          if (multi_ops) {
            row[col++] = mpv(shifted);
            row[col++] = mipv(shifted);
            row[col++] = lspv(shifted);
          }
        }
      }
    }
  }
  return std::move(fm);
}

}  // namespace

FeatureMatrix rocket_apply(const RocketTransform& t, const OrdinalDataset& ds) {
  FeatureMatrix fm;
  fm.values = Matrix(ds.size(), 2 * t.kernels.size());
  fm.columns.resize(2 * t.kernels.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double* row = fm.values.row(i).data();
    for (std::size_t k = 0; k < t.kernels.size(); ++k) {
      const Kernel& kn = t.kernels[k];
      const int tlen = static_cast<int>(ds.length());
      const int out_len = tlen + 2 * kn.padding - (kn.length() - 1) * kn.dilation;
      std::vector<double> z(static_cast<std::size_t>(out_len));
      for (int j = 0; j < out_len; ++j) {
        double acc = kn.bias;
        for (int w = 0; w < kn.length(); ++w) {
          const int pos = j - kn.padding + w * kn.dilation;
          if (pos < 0 || pos >= tlen) continue;
          for (const int c : kn.channels) {
            acc += kn.weights[static_cast<std::size_t>(w)] *
                   ds.instances[i].channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(pos)];
          }
        }
        z[static_cast<std::size_t>(j)] = acc;
      }
      row[2 * k] = ppv(z);
      row[2 * k + 1] = gmp(z);
    }
  }
  return fm;
}

FeatureMatrix minirocket_apply(const MiniRocketTransform& t, const OrdinalDataset& ds) {
  FeatureMatrix fm;
  const std::size_t f = 84 * static_cast<std::size_t>(t.plan.slots_per_kernel());
  fm.values = Matrix(ds.size(), f);
  fm.columns.resize(f);
  return plan_apply(t.plan, ds, false, 0, std::move(fm));
}

FeatureMatrix multirocket_apply(const MultiRocketTransform& t, const OrdinalDataset& ds) {
  FeatureMatrix fm;
  const std::size_t per_rep = 4 * 84 * static_cast<std::size_t>(t.base.slots_per_kernel());
  fm.values = Matrix(ds.size(), 2 * per_rep);
  fm.columns.resize(2 * per_rep);
  fm = plan_apply(t.base, ds, true, 0, std::move(fm));
  fm = plan_apply(t.diff, ds, true, per_rep, std::move(fm));
  return fm;
}

}  // namespace tsord::reference
