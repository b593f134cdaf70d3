#include "tsord/clm_head.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "internal_math.hpp"
#include "tsord/rng.hpp"

namespace tsord {

using detail::sigmoid;

std::vector<double> build_thresholds(double theta1, std::span<const double> alphas) {
  std::vector<double> theta(alphas.size() + 1);
  theta[0] = theta1;
  for (std::size_t i = 0; i < alphas.size(); ++i) theta[i + 1] = theta[i] + alphas[i] * alphas[i];
  return theta;
}

std::vector<double> clm_forward(double latent, std::span<const double> thresholds) {
  std::vector<double> p(thresholds.size() + 1);
  double prev = 0.0;
  for (std::size_t q = 0; q < thresholds.size(); ++q) {
    const double c = sigmoid(thresholds[q] - latent);
    p[q] = c - prev;
    prev = c;
  }
  p[thresholds.size()] = 1.0 - prev;
  return p;
}

Matrix qwk_penalty(int num_classes) {
  Matrix w(static_cast<std::size_t>(num_classes), static_cast<std::size_t>(num_classes));
  const double scale = static_cast<double>(num_classes - 1) * (num_classes - 1);
  for (int i = 0; i < num_classes; ++i) {
    for (int j = 0; j < num_classes; ++j) {
      w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          static_cast<double>((i - j) * (i - j)) / scale;
    }
  }
  return w;
}

namespace {

struct QwkParts {
  double numerator = 0.0;
  double denominator = 0.0;
  std::vector<double> column_factor;  // sum_q (N_q/N) * w[j][q], per predicted class j
};

QwkParts qwk_parts(const Matrix& p, const std::vector<int>& labels) {
  if (p.rows != labels.size()) throw std::invalid_argument("qwk_loss: row/label mismatch");
  if (p.rows == 0) throw std::invalid_argument("qwk_loss: empty batch");
  const int q = static_cast<int>(p.cols);
  const Matrix w = qwk_penalty(q);

  std::vector<double> prior(static_cast<std::size_t>(q), 0.0);
  for (const int y : labels) {
    if (y < 1 || y > q) throw std::invalid_argument("qwk_loss: label out of range");
    prior[static_cast<std::size_t>(y - 1)] += 1.0;
  }
  for (double& v : prior) v /= static_cast<double>(p.rows);

  std::vector<double> column_mass(static_cast<std::size_t>(q), 0.0);
  QwkParts parts;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const double* row = p.row(i).data();
    const double* wy = w.row(static_cast<std::size_t>(labels[i] - 1)).data();
    for (int c = 0; c < q; ++c) {
      parts.numerator += wy[c] * row[c];
      column_mass[static_cast<std::size_t>(c)] += row[c];
    }
  }
  parts.column_factor.assign(static_cast<std::size_t>(q), 0.0);
  for (int j = 0; j < q; ++j) {
    double factor = 0.0;
    for (int c = 0; c < q; ++c) {
      factor += prior[static_cast<std::size_t>(c)] * w(static_cast<std::size_t>(j), static_cast<std::size_t>(c));
    }
    parts.column_factor[static_cast<std::size_t>(j)] = factor;
    parts.denominator += factor * column_mass[static_cast<std::size_t>(j)];
  }
  return parts;
}

}  // namespace

double qwk_loss(const Matrix& probabilities, const std::vector<int>& labels) {
  const QwkParts parts = qwk_parts(probabilities, labels);
  if (parts.denominator < 1e-15) {
    throw std::invalid_argument("qwk_loss: degenerate batch (expectation term below 1e-15)");
  }
  return parts.numerator / parts.denominator;
}

Matrix qwk_loss_gradient(const Matrix& probabilities, const std::vector<int>& labels) {
  const QwkParts parts = qwk_parts(probabilities, labels);
  if (parts.denominator < 1e-15) {
    throw std::invalid_argument("qwk_loss: degenerate batch (expectation term below 1e-15)");
  }
  const int q = static_cast<int>(probabilities.cols);
  const Matrix w = qwk_penalty(q);
  const double den = parts.denominator;
  const double num = parts.numerator;

  Matrix grad(probabilities.rows, probabilities.cols);
  for (std::size_t i = 0; i < probabilities.rows; ++i) {
    const double* wy = w.row(static_cast<std::size_t>(labels[i] - 1)).data();
    double* g = grad.row(i).data();
    for (int c = 0; c < q; ++c) {
      g[c] = (wy[c] * den - num * parts.column_factor[static_cast<std::size_t>(c)]) / (den * den);
    }
  }
  return grad;
}

double cross_entropy_loss(const Matrix& probabilities, const std::vector<int>& labels) {
  if (probabilities.rows != labels.size()) throw std::invalid_argument("cross_entropy: row/label mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < probabilities.rows; ++i) {
    const double p = std::max(probabilities(i, static_cast<std::size_t>(labels[i] - 1)), 1e-300);
    loss -= std::log(p);
  }
  return loss / static_cast<double>(probabilities.rows);
}

Matrix cross_entropy_gradient(const Matrix& probabilities, const std::vector<int>& labels) {
  Matrix grad(probabilities.rows, probabilities.cols, 0.0);
  const double n = static_cast<double>(probabilities.rows);
  for (std::size_t i = 0; i < probabilities.rows; ++i) {
    const double p = std::max(probabilities(i, static_cast<std::size_t>(labels[i] - 1)), 1e-300);
    grad(i, static_cast<std::size_t>(labels[i] - 1)) = -1.0 / (n * p);
  }
  return grad;
}

double CLMHead::latent(std::span<const double> x) const {
  if (hidden_width == 0) return detail::dot(x, w2) + b2;
  double f = b2;
  for (int u = 0; u < hidden_width; ++u) {
    const double z =
        detail::dot(x, {w1.data() + static_cast<std::size_t>(u) * x.size(), x.size()}) +
        b1[static_cast<std::size_t>(u)];
    if (z > 0.0) f += w2[static_cast<std::size_t>(u)] * z;
  }
  return f;
}

Matrix CLMHead::predict_proba(const Matrix& x) const {
  const std::vector<double> theta = thresholds();
  Matrix out(x.rows, static_cast<std::size_t>(num_classes()));
  for (std::size_t i = 0; i < x.rows; ++i) {
    const std::vector<double> p = clm_forward(latent(x.row(i)), theta);
    std::copy(p.begin(), p.end(), out.row(i).begin());
  }
  return out;
}

std::vector<int> CLMHead::predict(const Matrix& x) const {
  const std::vector<double> theta = thresholds();
  std::vector<int> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double f = latent(x.row(i));
    int cls = static_cast<int>(theta.size()) + 1;
    for (std::size_t q = 0; q < theta.size(); ++q) {
      if (f <= theta[q]) {
        cls = static_cast<int>(q) + 1;
        break;
      }
    }
    out[i] = cls;
  }
  return out;
}

namespace {

Matrix head_forward(const CLMHead& head, const Matrix& x, std::vector<double>& latents) {
  const std::vector<double> theta = head.thresholds();
  Matrix p(x.rows, static_cast<std::size_t>(head.num_classes()));
  latents.resize(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    latents[i] = head.latent(x.row(i));
    const std::vector<double> row = clm_forward(latents[i], theta);
    std::copy(row.begin(), row.end(), p.row(i).begin());
  }
  return p;
}

}  // namespace

double head_loss(const CLMHead& head, const Matrix& x, const std::vector<int>& y, HeadLoss loss) {
  std::vector<double> latents;
  const Matrix p = head_forward(head, x, latents);
  return loss == HeadLoss::qwk ? qwk_loss(p, y) : cross_entropy_loss(p, y);
}

HeadGradient head_gradient(const CLMHead& head, const Matrix& x, const std::vector<int>& y,
                           HeadLoss loss) {
  const std::vector<double> theta = head.thresholds();
  const int q = head.num_classes();
  std::vector<double> latents;
  const Matrix p = head_forward(head, x, latents);
  const Matrix g = loss == HeadLoss::qwk ? qwk_loss_gradient(p, y) : cross_entropy_gradient(p, y);

  HeadGradient out;
  out.alphas.assign(head.alphas.size(), 0.0);
  out.w1.assign(head.w1.size(), 0.0);
  out.b1.assign(head.b1.size(), 0.0);
  out.w2.assign(head.w2.size(), 0.0);

  std::vector<double> theta_grad(theta.size(), 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double* gi = g.row(i).data();
    double dlatent = 0.0;
    for (std::size_t r = 0; r < theta.size(); ++r) {
      const double s = sigmoid(theta[r] - latents[i]);
      const double sp = s * (1.0 - s);
      // theta_r raises p_r and lowers p_{r+1}; the latent pull is the mirror image.
      const double pull = sp * (gi[r] - gi[r + 1]);
      theta_grad[r] += pull;
      dlatent -= pull;
    }

    // Backprop the latent into the projection.
    const auto row = x.row(i);
    if (head.hidden_width == 0) {
      for (std::size_t j = 0; j < row.size(); ++j) out.w2[j] += dlatent * row[j];
      out.b2 += dlatent;
    } else {
      for (int u = 0; u < head.hidden_width; ++u) {
        const double z =
            detail::dot(row, {head.w1.data() + static_cast<std::size_t>(u) * row.size(), row.size()}) +
            head.b1[static_cast<std::size_t>(u)];
        const double h = z > 0.0 ? z : 0.0;
        out.w2[static_cast<std::size_t>(u)] += dlatent * h;
        if (z > 0.0) {
          const double back = dlatent * head.w2[static_cast<std::size_t>(u)];
          double* gw1 = out.w1.data() + static_cast<std::size_t>(u) * row.size();
          for (std::size_t j = 0; j < row.size(); ++j) gw1[j] += back * row[j];
          out.b1[static_cast<std::size_t>(u)] += back;
        }
      }
      out.b2 += dlatent;
    }
  }

  // theta_k = theta1 + sum_{j<k} alpha_j^2.
  out.theta1 = 0.0;
  for (const double t : theta_grad) out.theta1 += t;
  double suffix = 0.0;
  for (std::size_t j = head.alphas.size(); j-- > 0;) {
    suffix += theta_grad[j + 1];
    out.alphas[j] = 2.0 * head.alphas[j] * suffix;
  }
  (void)q;
  return out;
}

CLMHead make_head(int input_dim, int num_classes, const HeadConfig& config) {
  if (num_classes < 2) throw std::invalid_argument("make_head: need at least two classes");
  CLMHead head;
  head.input_dim = input_dim;
  head.hidden_width = config.hidden_width;
  head.theta1 = -1.0;
  head.alphas.assign(static_cast<std::size_t>(num_classes - 2),
                     std::sqrt(2.0 / (num_classes - 1)));
  Rng rng(config.seed);
  const std::size_t w1_size =
      static_cast<std::size_t>(config.hidden_width) * static_cast<std::size_t>(input_dim);
  head.w1.resize(w1_size);
  for (double& w : head.w1) w = rng.uniform(-0.1, 0.1);
  head.b1.assign(static_cast<std::size_t>(config.hidden_width), 0.0);
  head.w2.resize(config.hidden_width == 0 ? static_cast<std::size_t>(input_dim)
                                          : static_cast<std::size_t>(config.hidden_width));
  for (double& w : head.w2) w = rng.uniform(-0.1, 0.1);
  head.b2 = 0.0;
  return head;
}

HeadFitResult fit_clm_head(const Matrix& features, const std::vector<int>& labels, int num_classes,
                           const HeadConfig& config) {
  if (features.rows != labels.size()) throw std::invalid_argument("fit_clm_head: row/label mismatch");
  {
    bool two = false;
    for (const int y : labels) two = two || y != labels.front();
    if (!two) throw std::invalid_argument("fit_clm_head: only one class present");
  }

  HeadFitResult result;
  result.head = make_head(static_cast<int>(features.cols), num_classes, config);

  const double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    result.loss_trajectory.push_back(head_loss(result.head, features, labels, config.loss));
    const HeadGradient g = head_gradient(result.head, features, labels, config.loss);
    if (!std::isfinite(result.loss_trajectory.back())) {
      throw std::runtime_error("fit_clm_head: non-finite loss");
    }
    CLMHead& h = result.head;
    h.theta1 -= lr * g.theta1;
    for (std::size_t i = 0; i < h.alphas.size(); ++i) h.alphas[i] -= lr * g.alphas[i];
    for (std::size_t i = 0; i < h.w1.size(); ++i) h.w1[i] -= lr * g.w1[i];
    for (std::size_t i = 0; i < h.b1.size(); ++i) h.b1[i] -= lr * g.b1[i];
    for (std::size_t i = 0; i < h.w2.size(); ++i) h.w2[i] -= lr * g.w2[i];
    h.b2 -= lr * g.b2;
  }
  result.loss_trajectory.push_back(head_loss(result.head, features, labels, config.loss));
  return result;
}

}  // namespace tsord
