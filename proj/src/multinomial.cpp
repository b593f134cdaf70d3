#include "tsord/multinomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "internal_fit.hpp"
#include "internal_math.hpp"
#include "tsord/lbfgs.hpp"

namespace tsord {

namespace {

// Scores for one row: s_q = W_q . x + b_q.
void scores_for(const double* row, std::size_t f, const Matrix& w, const std::vector<double>& b,
                std::vector<double>& s) {
  const int q = static_cast<int>(w.rows);
  s.resize(static_cast<std::size_t>(q));
  for (int c = 0; c < q; ++c) {
    s[static_cast<std::size_t>(c)] = detail::dot({row, f}, w.row(static_cast<std::size_t>(c))) +
                                     b[static_cast<std::size_t>(c)];
  }
}

double log_sum_exp(const std::vector<double>& s) {
  const double m = *std::max_element(s.begin(), s.end());
  double acc = 0.0;
  for (const double v : s) acc += std::exp(v - m);
  return m + std::log(acc);
}

inline const double* objective_row(const Matrix& m, std::size_t i) { return m.row(i).data(); }
inline const float* objective_row(const detail::FloatMatrix& m, std::size_t i) { return m.row(i); }

// params = [W (Q x F, row-major), b (Q)]. The fit core streams features as
// floats; the public loss/gradient entry points keep them double.
template <typename Mat>
double multinomial_objective(const Mat& x, const std::vector<int>& y, double lambda,
                             int q, const std::vector<double>& params, std::vector<double>& grad) {
  const std::size_t f = x.cols;
  std::fill(grad.begin(), grad.end(), 0.0);
  const double* w = params.data();
  const double* b = params.data() + static_cast<std::size_t>(q) * f;
  double* gw = grad.data();
  double* gb = grad.data() + static_cast<std::size_t>(q) * f;

  double loss = 0.0;
  std::vector<double> s(static_cast<std::size_t>(q));
  std::vector<double> converted(f);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto* row = objective_row(x, i);
    // One conversion per row; the Q dots and Q rank-1 updates then run on the
    // cached double image.
    for (std::size_t j = 0; j < f; ++j) converted[j] = static_cast<double>(row[j]);
    for (int c = 0; c < q; ++c) {
      s[static_cast<std::size_t>(c)] =
          detail::dot(converted.data(), w + static_cast<std::size_t>(c) * f, f) +
          b[static_cast<std::size_t>(c)];
    }
    const double lse = log_sum_exp(s);
    loss += lse - s[static_cast<std::size_t>(y[i] - 1)];
    for (int c = 0; c < q; ++c) {
      const double p = std::exp(s[static_cast<std::size_t>(c)] - lse);
      const double r = p - (c == y[i] - 1 ? 1.0 : 0.0);
      gb[c] += r;
      detail::axpy(r, converted.data(), gw + static_cast<std::size_t>(c) * f, f);
    }
  }
  double ww = 0.0;
  for (std::size_t j = 0; j < static_cast<std::size_t>(q) * f; ++j) {
    ww += w[j] * w[j];
    gw[j] += lambda * w[j];
  }
  return loss + 0.5 * lambda * ww;
}

}  // namespace

namespace detail {

void multinomial_fit_core(const FloatMatrix& x, const std::vector<int>& y, double lambda, int q,
                          const FitOptions& options, Matrix& w, std::vector<double>& b) {
  const std::size_t f = x.cols;
  std::vector<double> params(static_cast<std::size_t>(q) * f + static_cast<std::size_t>(q), 0.0);
  if (w.rows == static_cast<std::size_t>(q) && w.cols == f) {
    std::copy(w.data.begin(), w.data.end(), params.begin());
    std::copy(b.begin(), b.end(), params.begin() + static_cast<long>(static_cast<std::size_t>(q) * f));
  }
  LbfgsOptions lo;
  lo.max_iterations = options.max_iterations;
  lo.gradient_tolerance = options.tolerance;
  auto objective = [&](const std::vector<double>& p, std::vector<double>& g) {
    return multinomial_objective(x, y, lambda, q, p, g);
  };
  LbfgsResult r = lbfgs_minimize(objective, std::move(params), lo);

  w = Matrix(static_cast<std::size_t>(q), f);
  std::copy(r.x.begin(), r.x.begin() + static_cast<long>(static_cast<std::size_t>(q) * f),
            w.data.begin());
  b.assign(r.x.begin() + static_cast<long>(static_cast<std::size_t>(q) * f), r.x.end());
}

std::vector<int> multinomial_predict_core(const Matrix& x, const Matrix& w,
                                          const std::vector<double>& b) {
  std::vector<int> out(x.rows);
  std::vector<double> s;
  for (std::size_t i = 0; i < x.rows; ++i) {
    scores_for(x.row(i).data(), x.cols, w, b, s);
    out[i] = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin()) + 1;
  }
  return out;
}

}  // namespace detail

std::vector<int> MultinomialModel::predict(const Matrix& features) const {
  const Matrix scaled = scaler.mean.empty() ? features : apply_scaler(scaler, features);
  return detail::multinomial_predict_core(scaled, weights, intercepts);
}

Matrix MultinomialModel::predict_proba(const Matrix& features) const {
  const Matrix scaled = scaler.mean.empty() ? features : apply_scaler(scaler, features);
  Matrix out(features.rows, static_cast<std::size_t>(num_classes));
  std::vector<double> s;
  for (std::size_t i = 0; i < scaled.rows; ++i) {
    scores_for(scaled.row(i).data(), scaled.cols, weights, intercepts, s);
    const double lse = log_sum_exp(s);
    for (std::size_t c = 0; c < s.size(); ++c) out(i, c) = std::exp(s[c] - lse);
  }
  return out;
}

double multinomial_loss(const MultinomialModel& model, const Matrix& features,
                        const std::vector<int>& labels) {
  if (features.rows != labels.size()) throw std::invalid_argument("multinomial_loss: row/label mismatch");
  const int q = model.num_classes;
  std::vector<double> params(static_cast<std::size_t>(q) * features.cols + static_cast<std::size_t>(q));
  std::copy(model.weights.data.begin(), model.weights.data.end(), params.begin());
  std::copy(model.intercepts.begin(), model.intercepts.end(),
            params.begin() + static_cast<long>(static_cast<std::size_t>(q) * features.cols));
  std::vector<double> grad(params.size());
  return multinomial_objective(features, labels, model.lambda, q, params, grad);
}

MultinomialGradient multinomial_gradient(const MultinomialModel& model, const Matrix& features,
                                         const std::vector<int>& labels) {
  if (features.rows != labels.size()) {
    throw std::invalid_argument("multinomial_gradient: row/label mismatch");
  }
  const int q = model.num_classes;
  const std::size_t f = features.cols;
  std::vector<double> params(static_cast<std::size_t>(q) * f + static_cast<std::size_t>(q));
  std::copy(model.weights.data.begin(), model.weights.data.end(), params.begin());
  std::copy(model.intercepts.begin(), model.intercepts.end(),
            params.begin() + static_cast<long>(static_cast<std::size_t>(q) * f));
  std::vector<double> grad(params.size());
  multinomial_objective(features, labels, model.lambda, q, params, grad);

  MultinomialGradient g;
  g.weights = Matrix(static_cast<std::size_t>(q), f);
  std::copy(grad.begin(), grad.begin() + static_cast<long>(static_cast<std::size_t>(q) * f),
            g.weights.data.begin());
  g.intercepts.assign(grad.begin() + static_cast<long>(static_cast<std::size_t>(q) * f), grad.end());
  return g;
}

MultinomialModel fit_multinomial(const Matrix& features, const std::vector<int>& labels, double lambda,
                                 const FitOptions& options) {
  if (features.rows != labels.size()) throw std::invalid_argument("fit: row/label mismatch");
  int q = options.num_classes;
  if (q == 0) {
    for (const int y : labels) q = std::max(q, y);
  }
  if (q < 2) throw std::invalid_argument("fit: need at least two classes");
  {
    int first = labels.empty() ? 0 : labels.front();
    bool all_same = true;
    for (const int y : labels) {
      if (y < 1 || y > q) throw std::invalid_argument("fit: label out of range");
      all_same = all_same && y == first;
    }
    if (all_same) throw std::invalid_argument("fit: only one class present in labels");
  }

  MultinomialModel model;
  model.lambda = lambda;
  model.num_classes = q;

  const Matrix* x = &features;
  Matrix scaled;
  if (options.standardize) {
    model.scaler = fit_scaler(features);
    scaled = apply_scaler(model.scaler, features);
    x = &scaled;
  }
  FitOptions core = options;
  core.num_classes = q;
  detail::multinomial_fit_core(detail::FloatMatrix(*x), labels, lambda, q, core, model.weights,
                               model.intercepts);
  return model;
}

}  // namespace tsord
