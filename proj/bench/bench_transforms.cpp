// Compares the OpenMP transform kernels against the serial reference on a
// synthetic workload and checks that both routes agree. Sizes are chosen so
// a full run stays in the seconds range; pass a scale factor to grow them.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tsord/synth.hpp"
#include "tsord/transform.hpp"
#include "tsord/transform_reference.hpp"

using namespace tsord;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

double max_abs_diff(const FeatureMatrix& a, const FeatureMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.data.size(); ++i) {
    worst = std::max(worst, std::abs(a.values.data[i] - b.values.data[i]));
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  const double scale = argc > 1 ? std::atof(argv[1]) : 1.0;

  SynthConfig cfg;
  cfg.name = "bench";
  cfg.train_size = static_cast<int>(64 * scale);
  cfg.test_size = 1;
  cfg.length = static_cast<int>(96 * scale);
  cfg.classes = 3;
  const OrdinalDataset data = make_synthetic(cfg, cfg.train_size, 0);

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (OpenMP disabled)\n";
#endif
  std::cout << "instances: " << data.size() << ", length: " << data.length() << "\n\n";

  int failures = 0;
  const auto report = [&](const char* name, double parallel_ms, double serial_ms, double diff,
                          std::size_t cols) {
    std::cout << name << ": " << cols << " features\n"
              << "  parallel " << parallel_ms << " ms, serial reference " << serial_ms << " ms"
              << " (x" << serial_ms / parallel_ms << ")\n"
              << "  max |difference| " << diff << "\n";
    if (!(diff < 1e-9)) {
      std::cout << "  MISMATCH\n";
      ++failures;
    }
  };

  {
    TransformConfig tc;
    tc.variant = TransformVariant::rocket;
    tc.num_kernels = static_cast<int>(2000 * scale);
    tc.seed = 1;
    const RocketTransform t = RocketTransform::fit(data, tc);
    auto start = std::chrono::steady_clock::now();
    const FeatureMatrix fast = t.apply(data);
    const double fast_ms = ms_since(start);
    start = std::chrono::steady_clock::now();
    const FeatureMatrix slow = reference::rocket_apply(t, data);
    report("rocket", fast_ms, ms_since(start), max_abs_diff(fast, slow), fast.cols());
  }
  {
    TransformConfig tc;
    tc.variant = TransformVariant::minirocket;
    tc.seed = 2;
    const MiniRocketTransform t = MiniRocketTransform::fit(data, tc);
    auto start = std::chrono::steady_clock::now();
    const FeatureMatrix fast = t.apply(data);
    const double fast_ms = ms_since(start);
    start = std::chrono::steady_clock::now();
    const FeatureMatrix slow = reference::minirocket_apply(t, data);
    report("minirocket", fast_ms, ms_since(start), max_abs_diff(fast, slow), fast.cols());
  }
  {
    TransformConfig tc;
    tc.variant = TransformVariant::multirocket;
    tc.seed = 3;
    const MultiRocketTransform t = MultiRocketTransform::fit(data, tc);
    auto start = std::chrono::steady_clock::now();
    const FeatureMatrix fast = t.apply(data);
    const double fast_ms = ms_since(start);
    start = std::chrono::steady_clock::now();
    const FeatureMatrix slow = reference::multirocket_apply(t, data);
    report("multirocket", fast_ms, ms_since(start), max_abs_diff(fast, slow), fast.cols());
  }

  return failures;
}
