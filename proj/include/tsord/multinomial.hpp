#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsord/logistic_at.hpp"
#include "tsord/matrix.hpp"

namespace tsord {

/// L2-regularized softmax regression, the nominal baseline. Intercepts are
/// not penalized.
struct MultinomialModel {
  Matrix weights;  // Q x F, on standardized inputs
  std::vector<double> intercepts;
  double lambda = 0.0;
  Scaler scaler;
  int num_classes = 0;
  std::uint64_t seed = 0;
  std::string feature_hash;

  std::vector<int> predict(const Matrix& features) const;
  Matrix predict_proba(const Matrix& features) const;
};

/// Negative log-likelihood plus (lambda/2) * ||W||^2 on features as given.
double multinomial_loss(const MultinomialModel& model, const Matrix& features,
                        const std::vector<int>& labels);

struct MultinomialGradient {
  Matrix weights;
  std::vector<double> intercepts;
};

MultinomialGradient multinomial_gradient(const MultinomialModel& model, const Matrix& features,
                                         const std::vector<int>& labels);

/// Same optimizer contract as fit_logistic_at.
MultinomialModel fit_multinomial(const Matrix& features, const std::vector<int>& labels, double lambda,
                                 const FitOptions& options = {});

}  // namespace tsord
