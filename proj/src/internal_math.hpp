#pragma once

#include <cmath>
#include <span>

namespace tsord::detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

/// Sixteen independent accumulators: enough instruction-level parallelism to
/// keep wide FMA units busy (one vector accumulator alone is latency-bound).
/// The summation order is fixed, so results stay bit-reproducible run to run.
/// T may be float (optimizer storage) while the accumulation stays double.
template <typename T>
inline double dot(const T* a, const double* b, std::size_t n) {
  double acc[16] = {};
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    for (std::size_t k = 0; k < 16; ++k) acc[k] += static_cast<double>(a[i + k]) * b[i + k];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += static_cast<double>(a[i]) * b[i];
  double total = tail;
  for (std::size_t k = 0; k < 16; ++k) total += acc[k];
  return total;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return dot(a.data(), b.data(), a.size());
}

/// y += alpha * x
template <typename T>
inline void axpy(double alpha, const T* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * static_cast<double>(x[i]);
}

/// Row-major float image of a double matrix: the L-BFGS objectives stream the
/// feature block many hundreds of times, and halving the bytes roughly halves
/// the wall time. Parameters, gradients and sums stay double.
struct FloatMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  FloatMatrix() = default;
  template <typename M>
  explicit FloatMatrix(const M& m) : rows(m.rows), cols(m.cols), data(m.data.begin(), m.data.end()) {}

  const float* row(std::size_t i) const { return data.data() + i * cols; }
};

}  // namespace tsord::detail
