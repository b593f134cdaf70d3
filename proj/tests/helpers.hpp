#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "tsord/matrix.hpp"
#include "tsord/rng.hpp"

namespace tsord::test {

/// Central finite differences of a scalar function.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> x, double step = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double fp = f(x);
    x[i] = keep - step;
    const double fm = f(x);
    x[i] = keep;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

/// Max-norm difference scaled by the larger gradient magnitude (floored at 1).
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff / scale;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data) v = scale * rng.normal();
  return m;
}

inline std::vector<int> random_labels(std::size_t n, int num_classes, Rng& rng) {
  std::vector<int> y(n);
  // Guarantee at least two distinct classes.
  y[0] = 1;
  if (n > 1) y[1] = num_classes;
  for (std::size_t i = 2; i < n; ++i) y[i] = 1 + static_cast<int>(rng.next_below(num_classes));
  return y;
}

/// Exact two-sided signed-rank p-value by brute enumeration of all 2^n sign
/// assignments over the observed ranks (oracle; n must stay small).
double enumerate_exact_wilcoxon_p(const std::vector<double>& a, const std::vector<double>& b);

/// Random row-stochastic matrix with entries bounded away from zero.
inline Matrix random_probabilities(std::size_t rows, int num_classes, Rng& rng) {
  Matrix p(rows, static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < rows; ++i) {
    double total = 0.0;
    for (int c = 0; c < num_classes; ++c) {
      p(i, static_cast<std::size_t>(c)) = 0.05 + rng.next_double();
      total += p(i, static_cast<std::size_t>(c));
    }
    for (int c = 0; c < num_classes; ++c) p(i, static_cast<std::size_t>(c)) /= total;
  }
  return p;
}

}  // namespace tsord::test
