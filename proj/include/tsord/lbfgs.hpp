#pragma once

#include <functional>
#include <vector>

namespace tsord {

struct LbfgsOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;  // max-norm of the gradient
  int history = 20;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 50;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Objective callback: fill `grad` (pre-sized to x.size()) and return the value.
using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

/// Limited-memory BFGS with strong Wolfe line search. Deterministic: no
/// randomness, fixed evaluation order. Throws std::runtime_error when the
/// objective turns non-finite.
LbfgsResult lbfgs_minimize(const ObjectiveFn& f, std::vector<double> x0, const LbfgsOptions& opts = {});

}  // namespace tsord
