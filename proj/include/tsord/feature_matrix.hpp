#pragma once

#include <string>
#include <vector>

#include "tsord/matrix.hpp"

namespace tsord {

/// Provenance of one feature column: the kernel it came from, the pooling
/// operator, dilation, padding choice, the input representation
/// (0 = raw series, 1 = first-order difference) and the fitted bias.
struct ColumnMeta {
  std::string op = "raw";  // "raw", "ppv", "gmp", "mpv", "mipv", "lspv"
  int kernel = -1;
  int dilation = 0;
  bool padded = false;
  int representation = 0;
  double bias = 0.0;
};

/// N x F feature block with per-column provenance.
struct FeatureMatrix {
  Matrix values;
  std::vector<ColumnMeta> columns;

  std::size_t rows() const { return values.rows; }
  std::size_t cols() const { return values.cols; }
};

}  // namespace tsord
