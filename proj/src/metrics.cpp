#include "tsord/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tsord {

namespace {

void check_labels(const std::vector<int>& y_true, const std::vector<int>& y_pred, int num_classes) {
  if (y_true.empty()) throw std::invalid_argument("metric: empty input");
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("metric: length mismatch");
  if (num_classes > 0) {
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_true[i] < 1 || y_true[i] > num_classes || y_pred[i] < 1 || y_pred[i] > num_classes) {
        throw std::invalid_argument("metric: label outside 1.." + std::to_string(num_classes));
      }
    }
  }
}

}  // namespace

long ConfusionMatrix::row_total(int true_class) const {
  long acc = 0;
  for (int j = 1; j <= num_classes; ++j) acc += at(true_class, j);
  return acc;
}

long ConfusionMatrix::col_total(int predicted_class) const {
  long acc = 0;
  for (int i = 1; i <= num_classes; ++i) acc += at(i, predicted_class);
  return acc;
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          int num_classes) {
  check_labels(y_true, y_pred, num_classes);
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  cm.counts.assign(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    cm.counts[static_cast<std::size_t>((y_true[i] - 1) * num_classes + (y_pred[i] - 1))]++;
  }
  cm.total = static_cast<long>(y_true.size());
  return cm;
}

double ccr(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_labels(y_true, y_pred, 0);
  long hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double mae(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_labels(y_true, y_pred, 0);
  long acc = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) acc += std::abs(y_true[i] - y_pred[i]);
  return static_cast<double>(acc) / static_cast<double>(y_true.size());
}

double qwk(const std::vector<int>& y_true, const std::vector<int>& y_pred, int num_classes) {
  if (num_classes == 0) {
    for (const int y : y_true) num_classes = std::max(num_classes, y);
    for (const int y : y_pred) num_classes = std::max(num_classes, y);
  }
  const ConfusionMatrix cm = confusion(y_true, y_pred, num_classes);

  double observed = 0.0, expected = 0.0;
  for (int i = 1; i <= num_classes; ++i) {
    const double row = static_cast<double>(cm.row_total(i));
    for (int j = 1; j <= num_classes; ++j) {
      const double w = static_cast<double>((i - j)) * (i - j);  // (Q-1)^2 scale cancels in the ratio
      observed += w * static_cast<double>(cm.at(i, j));
      expected += w * row * static_cast<double>(cm.col_total(j)) / static_cast<double>(cm.total);
    }
  }
  if (expected == 0.0) {
    throw std::invalid_argument("qwk: degenerate confusion matrix (single true and predicted class)");
  }
  return 1.0 - observed / expected;
}

double one_off(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_labels(y_true, y_pred, 0);
  long hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += std::abs(y_true[i] - y_pred[i]) <= 1;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double one_off_banded(const ConfusionMatrix& cm) {
  long banded = 0;
  for (int i = 1; i <= cm.num_classes; ++i) {
    for (int j = std::max(1, i - 1); j <= std::min(cm.num_classes, i + 1); ++j) banded += cm.at(i, j);
  }
  return static_cast<double>(banded) / static_cast<double>(cm.total);
}

bool metric_lower_is_better(Metric m) { return m == Metric::mae; }

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::ccr: return "ccr";
    case Metric::mae: return "mae";
    case Metric::qwk: return "qwk";
    case Metric::one_off: return "one_off";
  }
  return "?";
}

Metric metric_from_string(std::string_view s) {
  if (s == "ccr") return Metric::ccr;
  if (s == "mae") return Metric::mae;
  if (s == "qwk") return Metric::qwk;
  if (s == "one_off" || s == "1off" || s == "one-off") return Metric::one_off;
  throw std::invalid_argument("unknown metric: " + std::string(s));
}

double evaluate_metric(Metric m, const std::vector<int>& y_true, const std::vector<int>& y_pred,
                       int num_classes) {
  switch (m) {
    case Metric::ccr: return ccr(y_true, y_pred);
    case Metric::mae: return mae(y_true, y_pred);
    case Metric::qwk: return qwk(y_true, y_pred, num_classes);
    case Metric::one_off: return one_off(y_true, y_pred);
  }
  throw std::logic_error("unreachable");
}

}  // namespace tsord
