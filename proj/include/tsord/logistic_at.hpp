#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsord/matrix.hpp"

namespace tsord {

/// Column-wise (x - mean) / std with statistics taken from training data
/// (population std). Columns with std below 1e-12 map to zero.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;
};

Scaler fit_scaler(const Matrix& train);
Matrix apply_scaler(const Scaler& s, const Matrix& x);

/// All-threshold ordinal classifier: a linear latent value against Q-1
/// ordered thresholds, logistic link. Thresholds come out non-decreasing at
/// convergence; fitting checks and rejects a violating solution.
struct LogisticATModel {
  std::vector<double> weights;     // F, on standardized inputs
  std::vector<double> thresholds;  // Q-1
  double lambda = 0.0;
  Scaler scaler;                   // empty when fitted without standardization
  int num_classes = 0;
  std::uint64_t seed = 0;
  std::string feature_hash;

  std::vector<double> decision_values(const Matrix& features) const;  // w . scaled(x)
  std::vector<int> predict(const Matrix& features) const;
  Matrix predict_cumulative(const Matrix& features) const;  // N x (Q-1), P(y <= C_q)
  Matrix predict_proba(const Matrix& features) const;       // N x Q
};

/// Surrogate loss on features as given (the scaler is not applied): for each
/// sample, softplus penalties pushing thresholds below the label's interval
/// down and those above it up, plus (lambda/2) * w.w.
double at_loss(const LogisticATModel& model, const Matrix& features, const std::vector<int>& labels);

struct AtGradient {
  std::vector<double> weights;
  std::vector<double> thresholds;
};

/// Exact analytic gradient of at_loss.
AtGradient at_gradient(const LogisticATModel& model, const Matrix& features,
                       const std::vector<int>& labels);

struct FitOptions {
  bool standardize = true;
  int num_classes = 0;  // 0: infer as max(labels)
  double tolerance = 1e-8;
  int max_iterations = 1000;
};

/// Quasi-Newton fit from w = 0 and thresholds evenly spaced in [-1, 1];
/// stops at gradient max-norm below tolerance or at the iteration cap.
LogisticATModel fit_logistic_at(const Matrix& features, const std::vector<int>& labels, double lambda,
                                const FitOptions& options = {});

/// The 10-point regularization grid 10^(-3 + 6i/9), i = 0..9.
std::vector<double> lambda_grid();

enum class ClassifierKind { logistic_at, multinomial };

struct CVReport {
  std::vector<double> grid;  // ascending
  Matrix fold_mae;           // grid x folds
  double chosen_lambda = 0.0;
  int folds = 5;
  std::vector<std::string> warnings;
};

/// 5-fold stratified cross-validation over lambda_grid() scored by MAE;
/// ties prefer the larger lambda. Classes too small for five folds reduce
/// the fold count (never below 2) and leave a warning record.
CVReport cross_validate_lambda(const Matrix& features, const std::vector<int>& labels,
                               ClassifierKind kind = ClassifierKind::logistic_at,
                               std::uint64_t seed = 0, const FitOptions& options = {});

/// Deterministic stratified fold assignment, one entry per sample in [0, folds).
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

}  // namespace tsord
