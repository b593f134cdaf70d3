#include "tsord/logistic_at.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "internal_fit.hpp"
#include "internal_math.hpp"
#include "tsord/lbfgs.hpp"
#include "tsord/metrics.hpp"
#include "tsord/rng.hpp"

namespace tsord {

using detail::sigmoid;
using detail::softplus;

Scaler fit_scaler(const Matrix& train) {
  if (train.rows == 0) throw std::invalid_argument("fit_scaler: empty matrix");
  Scaler s;
  s.mean.assign(train.cols, 0.0);
  s.stddev.assign(train.cols, 0.0);
  for (std::size_t i = 0; i < train.rows; ++i) {
    const double* row = train.row(i).data();
    for (std::size_t j = 0; j < train.cols; ++j) s.mean[j] += row[j];
  }
  for (double& m : s.mean) m /= static_cast<double>(train.rows);
  for (std::size_t i = 0; i < train.rows; ++i) {
    const double* row = train.row(i).data();
    for (std::size_t j = 0; j < train.cols; ++j) {
      const double d = row[j] - s.mean[j];
      s.stddev[j] += d * d;
    }
  }
  for (double& v : s.stddev) v = std::sqrt(v / static_cast<double>(train.rows));
  return s;
}

Matrix apply_scaler(const Scaler& s, const Matrix& x) {
  if (x.cols != s.mean.size()) throw std::invalid_argument("apply_scaler: column count mismatch");
  Matrix out(x.rows, x.cols);
  std::vector<double> factor(x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) factor[j] = s.stddev[j] < 1e-12 ? 0.0 : 1.0 / s.stddev[j];
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* src = x.row(i).data();
    double* dst = out.row(i).data();
    for (std::size_t j = 0; j < x.cols; ++j) dst[j] = (src[j] - s.mean[j]) * factor[j];
  }
  return out;
}

namespace {

// dL/dmargin and per-threshold gradient for one sample; returns the loss
// contribution. theta uses 0-based indexing (theta[q] is the boundary
// between classes q+1 and q+2).
inline double at_sample(double margin, int label, std::span<const double> theta, double& dmargin,
                        double* dtheta) {
  double loss = 0.0;
  dmargin = 0.0;
  const int below = label - 1;  // thresholds with 0-based index < below sit under the label
  for (int q = 0; q < static_cast<int>(theta.size()); ++q) {
    if (q < below) {
      const double z = theta[static_cast<std::size_t>(q)] - margin;
      loss += softplus(z);
      const double s = sigmoid(z);
      if (dtheta) dtheta[q] += s;
      dmargin -= s;
    } else {
      const double z = margin - theta[static_cast<std::size_t>(q)];
      loss += softplus(z);
      const double s = sigmoid(z);
      if (dtheta) dtheta[q] -= s;
      dmargin += s;
    }
  }
  return loss;
}

struct AtEval {
  double loss = 0.0;
};

// Full objective on scaled features; params = [w(F), theta(Q-1)]. Features
// are streamed as floats; see FloatMatrix.
double at_objective(const detail::FloatMatrix& x, const std::vector<int>& y, double lambda, int q,
                    const std::vector<double>& params, std::vector<double>& grad) {
  const std::size_t f = x.cols;
  const std::size_t t = static_cast<std::size_t>(q - 1);
  std::fill(grad.begin(), grad.end(), 0.0);
  std::span<const double> theta(params.data() + f, t);
  double* gw = grad.data();
  double* gt = grad.data() + f;

  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const float* row = x.row(i);
    const double margin = detail::dot(row, params.data(), f);
    double dmargin = 0.0;
    loss += at_sample(margin, y[i], theta, dmargin, gt);
    if (dmargin != 0.0) detail::axpy(dmargin, row, gw, f);
  }
  double ww = 0.0;
  for (std::size_t j = 0; j < f; ++j) {
    ww += params[j] * params[j];
    gw[j] += lambda * params[j];
  }
  return loss + 0.5 * lambda * ww;
}

std::vector<double> initial_params(std::size_t f, int q) {
  std::vector<double> p(f + static_cast<std::size_t>(q - 1), 0.0);
  for (int t = 0; t < q - 1; ++t) {
    p[f + static_cast<std::size_t>(t)] = q == 2 ? 0.0 : -1.0 + 2.0 * t / (q - 2.0);
  }
  return p;
}

int infer_classes(const std::vector<int>& labels, const FitOptions& options) {
  int q = options.num_classes;
  if (q == 0) {
    for (const int y : labels) q = std::max(q, y);
  }
  if (q < 2) throw std::invalid_argument("fit: need at least two classes");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw std::invalid_argument("fit: only one class present in labels");
  for (const int y : labels) {
    if (y < 1 || y > q) throw std::invalid_argument("fit: label out of range");
  }
  return q;
}

// Core fit on already-scaled features with explicit initial parameters.
std::vector<double> at_fit_core(const detail::FloatMatrix& x, const std::vector<int>& y,
                                double lambda, int q, std::vector<double> init,
                                const FitOptions& options) {
  LbfgsOptions lo;
  lo.max_iterations = options.max_iterations;
  lo.gradient_tolerance = options.tolerance;
  auto objective = [&](const std::vector<double>& p, std::vector<double>& g) {
    return at_objective(x, y, lambda, q, p, g);
  };
  LbfgsResult r = lbfgs_minimize(objective, std::move(init), lo);
  return std::move(r.x);
}

int class_from_margin(double margin, std::span<const double> theta) {
  for (std::size_t q = 0; q < theta.size(); ++q) {
    if (margin <= theta[q]) return static_cast<int>(q) + 1;
  }
  return static_cast<int>(theta.size()) + 1;
}

}  // namespace

std::vector<double> LogisticATModel::decision_values(const Matrix& features) const {
  if (features.cols != weights.size()) throw std::invalid_argument("predict: feature count mismatch");
  // Fold the scaler into the weights: w.(x - mu)/sd = (w/sd).x - w.mu/sd.
  std::vector<double> effective(weights);
  double offset = 0.0;
  if (!scaler.mean.empty()) {
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const double factor = scaler.stddev[j] < 1e-12 ? 0.0 : 1.0 / scaler.stddev[j];
      effective[j] = weights[j] * factor;
      offset += effective[j] * scaler.mean[j];
    }
  }
  std::vector<double> margins(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    margins[i] = detail::dot(features.row(i), effective) - offset;
  }
  return margins;
}

std::vector<int> LogisticATModel::predict(const Matrix& features) const {
  const std::vector<double> margins = decision_values(features);
  std::vector<int> out(margins.size());
  for (std::size_t i = 0; i < margins.size(); ++i) out[i] = class_from_margin(margins[i], thresholds);
  return out;
}

Matrix LogisticATModel::predict_cumulative(const Matrix& features) const {
  const std::vector<double> margins = decision_values(features);
  Matrix out(features.rows, thresholds.size());
  for (std::size_t i = 0; i < margins.size(); ++i) {
    for (std::size_t q = 0; q < thresholds.size(); ++q) {
      out(i, q) = sigmoid(thresholds[q] - margins[i]);
    }
  }
  return out;
}

Matrix LogisticATModel::predict_proba(const Matrix& features) const {
  const Matrix cumulative = predict_cumulative(features);
  const std::size_t q = thresholds.size() + 1;
  Matrix out(features.rows, q);
  for (std::size_t i = 0; i < features.rows; ++i) {
    double prev = 0.0;
    for (std::size_t c = 0; c + 1 < q; ++c) {
      out(i, c) = cumulative(i, c) - prev;
      prev = cumulative(i, c);
    }
    out(i, q - 1) = 1.0 - prev;
  }
  return out;
}

double at_loss(const LogisticATModel& model, const Matrix& features, const std::vector<int>& labels) {
  if (features.rows != labels.size()) throw std::invalid_argument("at_loss: row/label mismatch");
  if (features.cols != model.weights.size()) throw std::invalid_argument("at_loss: feature count mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double margin = detail::dot(features.row(i), model.weights);
    double dm = 0.0;
    loss += at_sample(margin, labels[i], model.thresholds, dm, nullptr);
  }
  double ww = 0.0;
  for (const double w : model.weights) ww += w * w;
  return loss + 0.5 * model.lambda * ww;
}

AtGradient at_gradient(const LogisticATModel& model, const Matrix& features,
                       const std::vector<int>& labels) {
  if (features.rows != labels.size()) throw std::invalid_argument("at_gradient: row/label mismatch");
  if (features.cols != model.weights.size()) {
    throw std::invalid_argument("at_gradient: feature count mismatch");
  }
  AtGradient g;
  g.weights.assign(model.weights.size(), 0.0);
  g.thresholds.assign(model.thresholds.size(), 0.0);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const double* row = features.row(i).data();
    const double margin = detail::dot(features.row(i), model.weights);
    double dm = 0.0;
    at_sample(margin, labels[i], model.thresholds, dm, g.thresholds.data());
    for (std::size_t j = 0; j < model.weights.size(); ++j) g.weights[j] += dm * row[j];
  }
  for (std::size_t j = 0; j < model.weights.size(); ++j) g.weights[j] += model.lambda * model.weights[j];
  return g;
}

LogisticATModel fit_logistic_at(const Matrix& features, const std::vector<int>& labels, double lambda,
                                const FitOptions& options) {
  if (features.rows != labels.size()) throw std::invalid_argument("fit: row/label mismatch");
  const int q = infer_classes(labels, options);

  LogisticATModel model;
  model.lambda = lambda;
  model.num_classes = q;

  const Matrix* x = &features;
  Matrix scaled;
  if (options.standardize) {
    model.scaler = fit_scaler(features);
    scaled = apply_scaler(model.scaler, features);
    x = &scaled;
  }

  std::vector<double> params = at_fit_core(detail::FloatMatrix(*x), labels, lambda, q,
                                           initial_params(features.cols, q), options);

  model.weights.assign(params.begin(), params.begin() + static_cast<long>(features.cols));
  model.thresholds.assign(params.begin() + static_cast<long>(features.cols), params.end());
  if (!std::is_sorted(model.thresholds.begin(), model.thresholds.end())) {
    throw std::runtime_error("fit_logistic_at: thresholds not ordered at convergence");
  }
  return model;
}

std::vector<double> lambda_grid() {
  std::vector<double> grid(10);
  for (int i = 0; i < 10; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, -3.0 + 6.0 * i / 9.0);
  return grid;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  int q = 0;
  for (const int y : labels) q = std::max(q, y);
  std::vector<int> fold_of(labels.size(), 0);
  for (int c = 1; c <= q; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    if (members.empty()) continue;
    Rng rng(seed, 0xF01D5, static_cast<std::uint64_t>(c));
    rng.shuffle(members);
    for (std::size_t i = 0; i < members.size(); ++i) {
      fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

CVReport cross_validate_lambda(const Matrix& features, const std::vector<int>& labels,
                               ClassifierKind kind, std::uint64_t seed, const FitOptions& options) {
  const int q = infer_classes(labels, options);
  FitOptions fit_options = options;
  fit_options.num_classes = q;

  long min_count = static_cast<long>(labels.size());
  for (int c = 1; c <= q; ++c) {
    const long n = std::count(labels.begin(), labels.end(), c);
    if (n > 0) min_count = std::min(min_count, n);
  }

  CVReport report;
  report.grid = lambda_grid();
  report.folds = static_cast<int>(std::clamp<long>(min_count, 2, 5));
  if (report.folds < 5) {
    report.warnings.push_back("smallest class has " + std::to_string(min_count) +
                              " members; folds reduced to " + std::to_string(report.folds));
  }
  report.fold_mae = Matrix(report.grid.size(), static_cast<std::size_t>(report.folds));

  const std::vector<int> fold_of = stratified_folds(labels, report.folds, seed);

  for (int fold = 0; fold < report.folds; ++fold) {
    std::vector<std::size_t> train_idx, val_idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (fold_of[i] == fold ? val_idx : train_idx).push_back(i);
    }

    Matrix xtr(train_idx.size(), features.cols);
    std::vector<int> ytr(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      const auto src = features.row(train_idx[i]);
      std::copy(src.begin(), src.end(), xtr.row(i).begin());
      ytr[i] = labels[train_idx[i]];
    }
    Matrix xval(val_idx.size(), features.cols);
    std::vector<int> yval(val_idx.size());
    for (std::size_t i = 0; i < val_idx.size(); ++i) {
      const auto src = features.row(val_idx[i]);
      std::copy(src.begin(), src.end(), xval.row(i).begin());
      yval[i] = labels[val_idx[i]];
    }

    const Scaler scaler = fit_scaler(xtr);
    xtr = apply_scaler(scaler, xtr);
    xval = apply_scaler(scaler, xval);
    const detail::FloatMatrix fxtr(xtr);
    FitOptions fold_options = fit_options;
    fold_options.standardize = false;  // already scaled
    // Selection only needs the fold-MAE ranking; a tighter optimizer budget
    // per grid point leaves the chosen lambda unchanged in practice. The
    // final refit (done by the caller) keeps the full fitting contract.
    fold_options.max_iterations = std::min(fold_options.max_iterations, 150);

    // Walk the grid from the strongest regularization down, warm-starting
    // each fit from the previous solution.
    if (kind == ClassifierKind::logistic_at) {
      std::vector<double> params = initial_params(features.cols, q);
      for (std::size_t gi = report.grid.size(); gi-- > 0;) {
        params = at_fit_core(fxtr, ytr, report.grid[gi], q, std::move(params), fold_options);
        LogisticATModel m;
        m.weights.assign(params.begin(), params.begin() + static_cast<long>(features.cols));
        m.thresholds.assign(params.begin() + static_cast<long>(features.cols), params.end());
        m.num_classes = q;
        report.fold_mae(gi, static_cast<std::size_t>(fold)) = mae(yval, m.predict(xval));
      }
    } else {
      Matrix w;
      std::vector<double> b;
      for (std::size_t gi = report.grid.size(); gi-- > 0;) {
        detail::multinomial_fit_core(fxtr, ytr, report.grid[gi], q, fold_options, w, b);
        report.fold_mae(gi, static_cast<std::size_t>(fold)) =
            mae(yval, detail::multinomial_predict_core(xval, w, b));
      }
    }
  }

  // Mean MAE per grid point; ties keep the larger lambda.
  std::size_t best = report.grid.size() - 1;
  double best_mean = 0.0;
  for (std::size_t gi = report.grid.size(); gi-- > 0;) {
    double mean = 0.0;
    for (int fold = 0; fold < report.folds; ++fold) {
      mean += report.fold_mae(gi, static_cast<std::size_t>(fold));
    }
    mean /= report.folds;
    if (gi == report.grid.size() - 1 || mean < best_mean) {
      best = gi;
      best_mean = mean;
    }
  }
  report.chosen_lambda = report.grid[best];
  return report;
}

}  // namespace tsord
