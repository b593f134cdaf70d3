#include "tsord/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tsord {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

std::vector<double> rank_with_ties(const std::vector<double>& values, bool ascending) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? values[a] < values[b] : values[a] > values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: length mismatch");

  std::vector<double> abs_diff;
  std::vector<int> sign;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    abs_diff.push_back(std::abs(d));
    sign.push_back(d > 0.0 ? 1 : -1);
  }

  WilcoxonResult r;
  r.n_effective = static_cast<int>(abs_diff.size());
  if (abs_diff.empty()) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }

  const std::vector<double> ranks = rank_with_ties(abs_diff, true);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    (sign[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
  }

  const int n = r.n_effective;
  if (n <= 20) {
    r.exact = true;
    // Exact distribution of W+ over the 2^n equiprobable sign assignments.
    // Ranks are multiples of 1/2 (mean ranks), so doubling makes them
    // integers and a subset-sum count gives the distribution exactly.
    std::vector<long> scaled(ranks.size());
    long total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      scaled[i] = std::lround(2.0 * ranks[i]);
      total += scaled[i];
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (const long s : scaled) {
      reach += s;
      for (long v = reach; v >= s; --v) {
        count[static_cast<std::size_t>(v)] += count[static_cast<std::size_t>(v - s)];
      }
    }
    const long observed = std::lround(2.0 * r.w_plus);
    double below = 0.0, above = 0.0;
    for (long v = 0; v <= total; ++v) {
      if (v <= observed) below += count[static_cast<std::size_t>(v)];
      if (v >= observed) above += count[static_cast<std::size_t>(v)];
    }
    const double denom = std::ldexp(1.0, n);  // 2^n, exact
    r.p_value = std::min(1.0, 2.0 * std::min(below, above) / denom);
  } else {
    // Normal approximation with tie-corrected variance and continuity.
    const double mean = n * (n + 1) / 4.0;
    double tie_term = 0.0;
    std::vector<double> sorted(abs_diff);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double var = n * (n + 1) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    const double delta = r.w_plus - mean;
    const double continuity = delta > 0.0 ? -0.5 : (delta < 0.0 ? 0.5 : 0.0);
    const double z = (delta + continuity) / std::sqrt(var);
    r.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
  }
  return r;
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled = std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, scaled);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

std::vector<bool> holm_significant(const std::vector<double>& p_values, double alpha) {
  const std::vector<double> adjusted = holm_adjust(p_values);
  std::vector<bool> out(adjusted.size());
  for (std::size_t i = 0; i < adjusted.size(); ++i) out[i] = adjusted[i] < alpha;
  return out;
}

namespace {

std::vector<std::size_t> complete_datasets(const ScoreTable& table,
                                           std::vector<std::string>* warnings) {
  std::vector<std::size_t> keep;
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    bool complete = true;
    for (std::size_t m = 0; m < table.methods.size(); ++m) {
      if (std::isnan(table.at(m, d))) {
        complete = false;
        break;
      }
    }
    if (complete) {
      keep.push_back(d);
    } else if (warnings) {
      warnings->push_back("dataset " + table.datasets[d] + " excluded: missing method values");
    }
  }
  return keep;
}

}  // namespace

std::vector<double> mean_ranks(const ScoreTable& table, bool lower_is_better,
                               std::vector<std::string>* warnings) {
  const std::size_t k = table.methods.size();
  if (k < 2) throw std::invalid_argument("mean_ranks: need at least two methods");
  const std::vector<std::size_t> keep = complete_datasets(table, warnings);
  if (keep.empty()) throw std::invalid_argument("mean_ranks: no complete dataset");

  std::vector<double> acc(k, 0.0);
  std::vector<double> column(k);
  for (const std::size_t d : keep) {
    for (std::size_t m = 0; m < k; ++m) column[m] = table.at(m, d);
    const std::vector<double> ranks = rank_with_ties(column, lower_is_better);
    for (std::size_t m = 0; m < k; ++m) acc[m] += ranks[m];
  }
  for (double& v : acc) v /= static_cast<double>(keep.size());
  return acc;
}

namespace {

// Pairwise signed-rank p-values over pairwise-complete datasets, flattened in
// (a < b) order.
std::vector<double> pairwise_p_values(const ScoreTable& table) {
  const std::size_t k = table.methods.size();
  std::vector<double> p;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<double> va, vb;
      for (std::size_t d = 0; d < table.datasets.size(); ++d) {
        const double x = table.at(a, d), y = table.at(b, d);
        if (std::isnan(x) || std::isnan(y)) continue;
        va.push_back(x);
        vb.push_back(y);
      }
      p.push_back(wilcoxon_signed_rank(va, vb).p_value);
    }
  }
  return p;
}

}  // namespace

std::vector<std::vector<int>> build_cliques(const ScoreTable& table, bool lower_is_better,
                                            double alpha) {
  const std::size_t k = table.methods.size();
  if (k < 2) throw std::invalid_argument("build_cliques: need at least two methods");

  const std::vector<bool> significant = holm_significant(pairwise_p_values(table), alpha);
  auto pair_index = [k](std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    return a * k - a * (a + 1) / 2 + (b - a - 1);
  };

  const std::vector<double> ranks = mean_ranks(table, lower_is_better, nullptr);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks[a] != ranks[b] ? ranks[a] < ranks[b] : a < b;
  });

  std::vector<std::vector<int>> cliques;
  for (std::size_t start = 0; start < k; ++start) {
    std::vector<int> clique = {static_cast<int>(order[start])};
    for (std::size_t next = start + 1; next < k; ++next) {
      bool compatible = true;
      for (const int member : clique) {
        if (significant[pair_index(static_cast<std::size_t>(member), order[next])]) {
          compatible = false;
          break;
        }
      }
      if (compatible) clique.push_back(static_cast<int>(order[next]));
    }
    std::sort(clique.begin(), clique.end());
    cliques.push_back(std::move(clique));
  }

  // Drop duplicates, then cliques strictly contained in another.
  std::sort(cliques.begin(), cliques.end());
  cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
  std::vector<std::vector<int>> maximal;
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    bool contained = false;
    for (std::size_t j = 0; j < cliques.size() && !contained; ++j) {
      contained = j != i && cliques[j].size() > cliques[i].size() &&
                  std::includes(cliques[j].begin(), cliques[j].end(), cliques[i].begin(),
                                cliques[i].end());
    }
    if (!contained) maximal.push_back(cliques[i]);
  }
  return maximal;
}

std::vector<std::vector<McmCell>> mcm(const ScoreTable& table, bool lower_is_better) {
  const std::size_t k = table.methods.size();
  if (k < 2) throw std::invalid_argument("mcm: need at least two methods");
  std::vector<std::vector<McmCell>> cells(k, std::vector<McmCell>(k));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      McmCell& cell = cells[a][b];
      std::vector<double> va, vb;
      for (std::size_t d = 0; d < table.datasets.size(); ++d) {
        const double x = table.at(a, d), y = table.at(b, d);
        if (std::isnan(x) || std::isnan(y)) continue;
        va.push_back(x);
        vb.push_back(y);
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < va.size(); ++i) {
        diff += va[i] - vb[i];
        const double delta = va[i] - vb[i];
        if (std::abs(delta) <= 1e-10) {
          ++cell.ties;
        } else if ((delta < 0.0) == lower_is_better) {
          ++cell.wins;
        } else {
          ++cell.losses;
        }
      }
      cell.mean_diff = va.empty() ? 0.0 : diff / static_cast<double>(va.size());
      const WilcoxonResult w = wilcoxon_signed_rank(va, vb);
      cell.p_value = w.p_value;
      cell.degenerate = w.degenerate;
    }
  }
  return cells;
}

Matrix relative_mae(const ScoreTable& mae_table, RelMaeForm form) {
  const std::size_t k = mae_table.methods.size();
  const std::size_t nd = mae_table.datasets.size();
  Matrix out(k, nd, kNaN);
  for (std::size_t d = 0; d < nd; ++d) {
    std::vector<double> column;
    for (std::size_t m = 0; m < k; ++m) {
      const double v = mae_table.at(m, d);
      if (std::isnan(v)) break;
      column.push_back(v);
    }
    if (column.size() != k) continue;  // incomplete dataset stays NaN

    std::vector<double> sorted(column);
    std::sort(sorted.begin(), sorted.end());
    const double median = k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);

    for (std::size_t m = 0; m < k; ++m) {
      const double v = column[m];
      if (form == RelMaeForm::shifted) {
        out(m, d) = (v == 0.0 && median == 0.0) ? 0.5 : v / (v + median);
      } else {
        out(m, d) = (v == 0.0 && median == 0.0) ? 1.0 : v / median;
      }
    }
  }
  return out;
}

}  // namespace tsord
