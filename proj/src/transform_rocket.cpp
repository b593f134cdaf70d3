#include <algorithm>
#include <stdexcept>

#include "tsord/transform.hpp"

namespace tsord {

RocketTransform RocketTransform::fit(const OrdinalDataset& train, const TransformConfig& config) {
  RocketTransform t;
  t.series_length = static_cast<int>(train.length());
  t.num_channels = static_cast<int>(train.num_channels());
  t.kernels = generate_rocket_kernels(t.series_length, config.num_kernels, t.num_channels,
                                      config.seed, config.center_weights);
  return t;
}

FeatureMatrix RocketTransform::apply(const OrdinalDataset& ds) const {
  if (static_cast<int>(ds.length()) != series_length || static_cast<int>(ds.num_channels()) != num_channels) {
    throw std::invalid_argument("rocket: dataset shape differs from the fitted shape");
  }
  const std::size_t n = ds.size();
  const std::size_t f = 2 * kernels.size();

  FeatureMatrix fm;
  fm.values = Matrix(n, f);
  fm.columns.resize(f);
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    for (std::size_t op = 0; op < 2; ++op) {
      ColumnMeta& m = fm.columns[2 * k + op];
      m.op = op == 0 ? "ppv" : "gmp";
      m.kernel = static_cast<int>(k);
      m.dilation = kernels[k].dilation;
      m.padded = kernels[k].padding > 0;
      m.representation = 0;
      m.bias = kernels[k].bias;
    }
  }

#pragma omp parallel
  {
    std::vector<double> summed;
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(n); ++i) {
      const TimeSeriesInstance& inst = ds.instances[static_cast<std::size_t>(i)];
      double* row = fm.values.row(static_cast<std::size_t>(i)).data();
      for (std::size_t k = 0; k < kernels.size(); ++k) {
        const Kernel& kn = kernels[k];
        // Weights are shared across the channel subset, so summing the
        // channels first is the same dot product.
        const std::vector<double>* series = &inst.channels[0];
        if (kn.channels.size() > 1) {
          summed.assign(inst.length(), 0.0);
          for (const int c : kn.channels) {
            const auto& src = inst.channels[static_cast<std::size_t>(c)];
            for (std::size_t t = 0; t < summed.size(); ++t) summed[t] += src[t];
          }
          series = &summed;
        } else if (kn.channels.size() == 1) {
          series = &inst.channels[static_cast<std::size_t>(kn.channels[0])];
        }
        const std::vector<double> z = convolve(*series, kn);
        row[2 * k] = ppv(z);
        row[2 * k + 1] = gmp(z);
      }
    }
  }
  return fm;
}

}  // namespace tsord
