#pragma once

#include <string_view>
#include <vector>

namespace tsord {

struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<long> counts;  // row-major Q x Q, counts[(i-1)*Q + (j-1)] = #(true i, predicted j)
  long total = 0;

  long at(int true_class, int predicted_class) const {
    return counts[static_cast<std::size_t>((true_class - 1) * num_classes + (predicted_class - 1))];
  }
  long row_total(int true_class) const;
  long col_total(int predicted_class) const;
};

/// Tabulate true-vs-predicted counts; labels must lie in 1..num_classes.
ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          int num_classes);

/// Fraction of exact matches.
double ccr(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Mean absolute label distance on the 1..Q integer scale.
double mae(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Quadratic weighted kappa: 1 - sum(w*O) / sum(w*E) with quadratic penalty
/// weights and independence expectation E = rowtot*coltot/N. num_classes 0
/// infers Q from the labels. Throws when the expectation denominator is zero
/// (all mass on one true and one predicted class).
double qwk(const std::vector<int>& y_true, const std::vector<int>& y_pred, int num_classes = 0);

/// Fraction of predictions within one class of the truth.
double one_off(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Same quantity through the banded-matrix route: sum of the tridiagonal band
/// of the confusion matrix over its total.
double one_off_banded(const ConfusionMatrix& cm);

enum class Metric { ccr, mae, qwk, one_off };

bool metric_lower_is_better(Metric m);
std::string_view to_string(Metric m);
Metric metric_from_string(std::string_view s);
double evaluate_metric(Metric m, const std::vector<int>& y_true, const std::vector<int>& y_pred,
                       int num_classes);

}  // namespace tsord
