#pragma once

#include <string>
#include <vector>

#include "tsord/matrix.hpp"

namespace tsord {

struct WilcoxonResult {
  double p_value = 1.0;
  double w_plus = 0.0;     // rank sum of positive differences
  double w_minus = 0.0;
  int n_effective = 0;     // pairs left after dropping zero differences
  bool exact = false;      // exact distribution used (n <= 20)
  bool degenerate = false; // all differences were zero
};

/// Two-sided paired signed-rank test. Zero differences are dropped, tied
/// absolute differences get mean ranks. Exact distribution for up to 20
/// effective pairs, normal approximation with continuity and tie correction
/// beyond that.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

/// Step-down Holm adjustment; output is >= input and non-decreasing in the
/// sorted order.
std::vector<double> holm_adjust(const std::vector<double>& p_values);
std::vector<bool> holm_significant(const std::vector<double>& p_values, double alpha = 0.05);

/// Ranks 1..n (1 = best) with ties averaged. ascending = true ranks smaller
/// values better.
std::vector<double> rank_with_ties(const std::vector<double>& values, bool ascending);

/// Method-by-dataset score table; NaN marks a missing cell.
struct ScoreTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  Matrix values;  // methods x datasets

  double at(std::size_t method, std::size_t dataset) const { return values(method, dataset); }
};

/// Per-dataset ranks averaged over datasets. Datasets missing any method are
/// excluded (one warning line each).
std::vector<double> mean_ranks(const ScoreTable& table, bool lower_is_better,
                               std::vector<std::string>* warnings = nullptr);

/// Groups of methods without a Holm-significant pairwise difference, grown
/// greedily in mean-rank order; subset groups are dropped. Every method lands
/// in at least one clique.
std::vector<std::vector<int>> build_cliques(const ScoreTable& table, bool lower_is_better,
                                            double alpha = 0.05);

struct McmCell {
  double mean_diff = 0.0;  // row method minus column method
  int wins = 0, ties = 0, losses = 0;
  double p_value = 1.0;
  bool degenerate = false;
};

/// Full pairwise comparison: mean difference, win/tie/loss counts at
/// tolerance 1e-10, and the signed-rank p-value, per ordered method pair.
std::vector<std::vector<McmCell>> mcm(const ScoreTable& table, bool lower_is_better);

enum class RelMaeForm {
  shifted,  // mae / (mae + median): the dataset-median method sits at 0.5
  ratio     // mae / median: the dataset-median method sits at 1.0
};

/// Per-method, per-dataset MAE scaled against the dataset's median method.
/// An all-zero dataset row maps to the neutral point of the chosen form.
Matrix relative_mae(const ScoreTable& mae_table, RelMaeForm form = RelMaeForm::shifted);

}  // namespace tsord
