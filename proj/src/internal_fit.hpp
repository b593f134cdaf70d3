#pragma once

#include <vector>

#include "internal_math.hpp"
#include "tsord/logistic_at.hpp"
#include "tsord/matrix.hpp"

namespace tsord::detail {

// Softmax-regression core on already-scaled features. `w` (Q x F) and `b`
// act as warm start when non-empty; both are overwritten with the solution.
void multinomial_fit_core(const FloatMatrix& x, const std::vector<int>& y, double lambda, int q,
                          const FitOptions& options, Matrix& w, std::vector<double>& b);

std::vector<int> multinomial_predict_core(const Matrix& x, const Matrix& w,
                                          const std::vector<double>& b);

}  // namespace tsord::detail
