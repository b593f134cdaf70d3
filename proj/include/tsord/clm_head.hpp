#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsord/matrix.hpp"

namespace tsord {

/// Ordered thresholds from unconstrained parameters: theta_q is theta1 plus
/// the cumulative sum of squared alphas, so the sequence never decreases.
std::vector<double> build_thresholds(double theta1, std::span<const double> alphas);

/// Class probabilities for one latent value: adjacent differences of the
/// logistic CDF at the thresholds, with the two ends pinned at 0 and 1.
std::vector<double> clm_forward(double latent, std::span<const double> thresholds);

/// Quadratic class-distance penalties w[j][q] = (j-q)^2 / (Q-1)^2 as a
/// Q x Q matrix (0-based storage for 1-based classes).
Matrix qwk_penalty(int num_classes);

/// Kappa-style loss in [0, 2] on a row-stochastic probability matrix:
/// penalty-weighted predicted mass around the true labels over its
/// class-prior-weighted expectation. Throws when the expectation term falls
/// below 1e-15 (single-class degenerate batch).
double qwk_loss(const Matrix& probabilities, const std::vector<int>& labels);

/// Exact gradient of qwk_loss with respect to every probability entry.
Matrix qwk_loss_gradient(const Matrix& probabilities, const std::vector<int>& labels);

/// Mean negative log-likelihood of the true class.
double cross_entropy_loss(const Matrix& probabilities, const std::vector<int>& labels);
Matrix cross_entropy_gradient(const Matrix& probabilities, const std::vector<int>& labels);

enum class HeadLoss { qwk, cross_entropy };

/// Scalar projection (optionally through one rectified hidden layer) feeding
/// a CLM output layer. Thresholds live in the unconstrained
/// (theta1, alphas) parameterization.
struct CLMHead {
  double theta1 = -1.0;
  std::vector<double> alphas;  // Q-2 entries
  int input_dim = 0;
  int hidden_width = 0;        // 0: linear projection
  std::vector<double> w1;      // hidden_width x input_dim
  std::vector<double> b1;      // hidden_width
  std::vector<double> w2;      // hidden_width, or input_dim when linear
  double b2 = 0.0;

  int num_classes() const { return static_cast<int>(alphas.size()) + 2; }
  std::vector<double> thresholds() const { return build_thresholds(theta1, alphas); }
  double latent(std::span<const double> x) const;
  Matrix predict_proba(const Matrix& x) const;
  std::vector<int> predict(const Matrix& x) const;
};

struct HeadConfig {
  int hidden_width = 0;
  double learning_rate = 1e-2;
  int epochs = 200;
  std::uint64_t seed = 0;
  HeadLoss loss = HeadLoss::qwk;
};

/// All head parameters in one flat gradient, same layout as the fields.
struct HeadGradient {
  double theta1 = 0.0;
  std::vector<double> alphas;
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;
};

double head_loss(const CLMHead& head, const Matrix& x, const std::vector<int>& y, HeadLoss loss);
HeadGradient head_gradient(const CLMHead& head, const Matrix& x, const std::vector<int>& y,
                           HeadLoss loss);

/// Seeded initial head: thresholds spread from -1 with equal square steps,
/// projection weights Uniform(-0.1, 0.1).
CLMHead make_head(int input_dim, int num_classes, const HeadConfig& config);

struct HeadFitResult {
  CLMHead head;
  std::vector<double> loss_trajectory;  // loss before each update, then final
};

/// Full-batch gradient descent at a fixed learning rate; deterministic given
/// the seed. epochs = 0 returns the initialized head untouched.
HeadFitResult fit_clm_head(const Matrix& features, const std::vector<int>& labels, int num_classes,
                           const HeadConfig& config);

}  // namespace tsord
