// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Dataset-scale checks run on deterministic synthetic stand-ins that
// mirror the shapes of the archive problems they are named after, generated
// on the fly (this environment has no network access to the archive).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tsord/clm_head.hpp"
#include "tsord/dataset.hpp"
#include "tsord/harness.hpp"
#include "tsord/logistic_at.hpp"
#include "tsord/metrics.hpp"
#include "tsord/multinomial.hpp"
#include "tsord/stats.hpp"
#include "tsord/synth.hpp"
#include "tsord/transform.hpp"

using namespace tsord;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

fs::path standins_dir;

struct StandIn {
  std::string name;
  int train, test;
};
const std::vector<StandIn> kPhalanx = {
    {"DistalPhalanxOAG", 400, 139}, {"MiddlePhalanxOAG", 400, 154}, {"ProximalPhalanxOAG", 400, 205}};

void make_standins() {
  standins_dir = fs::temp_directory_path() / "tsord_acceptance_data";
  fs::remove_all(standins_dir);
  fs::create_directories(standins_dir);
  for (const StandIn& s : kPhalanx) {
    SynthConfig cfg;
    cfg.name = s.name;
    cfg.train_size = s.train;
    cfg.test_size = s.test;
    cfg.length = 80;
    cfg.channels = 1;
    cfg.classes = 3;
    cfg.class_weights = {0.30, 0.45, 0.25};
    cfg.noise = 0.55;
    cfg.seed = hash64(s.name);
    const SplitPair split = make_synthetic_split(cfg);
    write_ts_file(split.train, standins_dir / (s.name + "_TRAIN.ts"));
    write_ts_file(split.test, standins_dir / (s.name + "_TEST.ts"));
  }
}

// ---------------------------------------------------------------- 1

void gradient_oracles(Check& c) {
  using test::finite_difference;
  using test::relative_error;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  Rng rng(101);

  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.next_below(12);
    const std::size_t f = 1 + rng.next_below(6);
    const int q = 2 + static_cast<int>(rng.next_below(4));
    const Matrix x = test::random_matrix(n, f, rng);
    const std::vector<int> y = test::random_labels(n, q, rng);
    const double lambda = std::pow(10.0, rng.uniform(-3, 1));

    LogisticATModel m;
    m.weights.resize(f);
    m.thresholds.resize(static_cast<std::size_t>(q - 1));
    for (double& v : m.weights) v = rng.normal();
    for (double& v : m.thresholds) v = rng.normal();
    std::sort(m.thresholds.begin(), m.thresholds.end());
    m.lambda = lambda;
    m.num_classes = q;

    const AtGradient g = at_gradient(m, x, y);
    std::vector<double> analytic(g.weights);
    analytic.insert(analytic.end(), g.thresholds.begin(), g.thresholds.end());
    std::vector<double> params(m.weights);
    params.insert(params.end(), m.thresholds.begin(), m.thresholds.end());
    const auto value = [&](const std::vector<double>& p) {
      LogisticATModel probe = m;
      probe.weights.assign(p.begin(), p.begin() + static_cast<long>(f));
      probe.thresholds.assign(p.begin() + static_cast<long>(f), p.end());
      return at_loss(probe, x, y);
    };
    const double err = relative_error(analytic, finite_difference(value, params));
    c.require(err < 1e-5, "at_gradient mismatch, rel error " + std::to_string(err));
  }

  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.next_below(10);
    const std::size_t f = 1 + rng.next_below(5);
    const int q = 2 + static_cast<int>(rng.next_below(3));
    const Matrix x = test::random_matrix(n, f, rng);
    const std::vector<int> y = test::random_labels(n, q, rng);

    MultinomialModel m;
    m.weights = test::random_matrix(static_cast<std::size_t>(q), f, rng);
    m.intercepts.resize(static_cast<std::size_t>(q));
    for (double& b : m.intercepts) b = rng.normal();
    m.lambda = std::pow(10.0, rng.uniform(-3, 0));
    m.num_classes = q;

    const MultinomialGradient g = multinomial_gradient(m, x, y);
    std::vector<double> analytic(g.weights.data);
    analytic.insert(analytic.end(), g.intercepts.begin(), g.intercepts.end());
    std::vector<double> params(m.weights.data);
    params.insert(params.end(), m.intercepts.begin(), m.intercepts.end());
    const auto value = [&](const std::vector<double>& p) {
      MultinomialModel probe = m;
      std::copy(p.begin(), p.begin() + static_cast<long>(static_cast<std::size_t>(q) * f),
                probe.weights.data.begin());
      probe.intercepts.assign(p.begin() + static_cast<long>(static_cast<std::size_t>(q) * f),
                              p.end());
      return multinomial_loss(probe, x, y);
    };
    const double err = relative_error(analytic, finite_difference(value, params));
    c.require(err < 1e-5, "multinomial gradient mismatch, rel error " + std::to_string(err));
  }

  // clm-head: thresholds, projection (linear and hidden), both losses.
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng.next_below(12);
    const int f = 1 + static_cast<int>(rng.next_below(4));
    const int q = 3 + static_cast<int>(rng.next_below(3));
    const int hidden = rep % 3 == 0 ? 0 : 1 + static_cast<int>(rng.next_below(3));
    const HeadLoss loss = rep % 4 == 0 ? HeadLoss::cross_entropy : HeadLoss::qwk;
    const Matrix x = test::random_matrix(n, static_cast<std::size_t>(f), rng);
    const std::vector<int> y = test::random_labels(n, q, rng);

    HeadConfig cfg;
    cfg.hidden_width = hidden;
    CLMHead head;
    // Regenerate until hidden pre-activations avoid the rectifier kink and,
    // for the log loss, no true-class probability is saturated (finite
    // differences of -log p lose accuracy as p -> 0).
    for (std::uint64_t attempt = 0;; ++attempt) {
      cfg.seed = rng.next_u64() + attempt;
      head = make_head(f, q, cfg);
      head.theta1 = rng.normal();
      for (double& a : head.alphas) a = rng.normal();
      for (double& w : head.w1) w = rng.normal();
      for (double& b : head.b1) b = 0.3 * rng.normal();
      for (double& w : head.w2) w = rng.normal();
      head.b2 = 0.3 * rng.normal();
      bool clean = true;
      for (std::size_t i = 0; i < x.rows && clean; ++i) {
        for (int u = 0; u < hidden && clean; ++u) {
          double z = head.b1[static_cast<std::size_t>(u)];
          for (int j = 0; j < f; ++j) {
            z += head.w1[static_cast<std::size_t>(u) * static_cast<std::size_t>(f) +
                         static_cast<std::size_t>(j)] *
                 x(i, static_cast<std::size_t>(j));
          }
          clean = std::abs(z) > 1e-3;
        }
      }
      if (clean && loss == HeadLoss::cross_entropy) {
        const Matrix p = head.predict_proba(x);
        for (std::size_t i = 0; i < x.rows && clean; ++i) {
          clean = p(i, static_cast<std::size_t>(y[i] - 1)) > 1e-3;
        }
      }
      if (clean) break;
    }

    const HeadGradient g = head_gradient(head, x, y, loss);
    std::vector<double> analytic{g.theta1};
    analytic.insert(analytic.end(), g.alphas.begin(), g.alphas.end());
    analytic.insert(analytic.end(), g.w1.begin(), g.w1.end());
    analytic.insert(analytic.end(), g.b1.begin(), g.b1.end());
    analytic.insert(analytic.end(), g.w2.begin(), g.w2.end());
    analytic.push_back(g.b2);

    std::vector<double> params{head.theta1};
    params.insert(params.end(), head.alphas.begin(), head.alphas.end());
    params.insert(params.end(), head.w1.begin(), head.w1.end());
    params.insert(params.end(), head.b1.begin(), head.b1.end());
    params.insert(params.end(), head.w2.begin(), head.w2.end());
    params.push_back(head.b2);

    const auto value = [&](const std::vector<double>& p) {
      CLMHead probe = head;
      std::size_t k = 0;
      probe.theta1 = p[k++];
      for (double& v : probe.alphas) v = p[k++];
      for (double& v : probe.w1) v = p[k++];
      for (double& v : probe.b1) v = p[k++];
      for (double& v : probe.w2) v = p[k++];
      probe.b2 = p[k++];
      return head_loss(probe, x, y, loss);
    };
    const double err = relative_error(analytic, finite_difference(value, params));
    c.require(err < 1e-5, "head gradient mismatch, rel error " + std::to_string(err));
  }

  c.require(std::chrono::steady_clock::now() < deadline, "gradient oracles exceeded 60 s");
}

// ---------------------------------------------------------------- 2

void threshold_ordering(Check& c) {
  Rng rng(202);
  int ordered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 30 + rng.next_below(40);
    const int q = 3 + static_cast<int>(rng.next_below(3));
    Matrix x(n, 2 + rng.next_below(3));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 1 + static_cast<int>(rng.next_below(q));
      x(i, 0) = y[i] + 0.6 * rng.normal();
      for (std::size_t j = 1; j < x.cols; ++j) x(i, j) = rng.normal();
    }
    y[0] = 1;
    y[n - 1] = q;
    const double lambda = std::pow(10.0, rng.uniform(-3, 2));
    const LogisticATModel m = fit_logistic_at(x, y, lambda);
    ordered += std::is_sorted(m.thresholds.begin(), m.thresholds.end());
  }
  c.require(ordered == 100, "ordered thresholds in " + std::to_string(ordered) + "/100 fits");

  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> alphas(rng.next_below(6));
    for (double& a : alphas) a = 4.0 * rng.normal();
    const std::vector<double> theta = build_thresholds(rng.normal(), alphas);
    c.require(std::is_sorted(theta.begin(), theta.end()), "build_thresholds not ordered");
  }
}

// ---------------------------------------------------------------- 3

void probability_simplex(Check& c) {
  Rng rng(303);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t f = 1 + rng.next_below(5);
    const int q = 2 + static_cast<int>(rng.next_below(4));
    LogisticATModel m;
    m.weights.resize(f);
    m.thresholds.resize(static_cast<std::size_t>(q - 1));
    for (double& v : m.weights) v = rng.normal();
    for (double& v : m.thresholds) v = 2.0 * rng.normal();
    std::sort(m.thresholds.begin(), m.thresholds.end());
    m.num_classes = q;

    const Matrix x = test::random_matrix(4, f, rng, 2.0);
    const Matrix p = m.predict_proba(x);
    for (std::size_t i = 0; i < p.rows; ++i) {
      double total = 0.0;
      for (std::size_t col = 0; col < p.cols; ++col) {
        c.require(p(i, col) >= 0.0, "negative class probability");
        total += p(i, col);
      }
      c.require(std::abs(total - 1.0) < 1e-12, "probabilities sum to " + std::to_string(total));
    }

    const std::vector<double> alphas(static_cast<std::size_t>(q - 2), rng.next_double());
    const std::vector<double> theta = build_thresholds(rng.normal(), alphas);
    const std::vector<double> probs = clm_forward(3.0 * rng.normal(), theta);
    double total = 0.0;
    for (const double v : probs) {
      c.require(v >= 0.0, "negative clm_forward probability");
      total += v;
    }
    c.require(std::abs(total - 1.0) < 1e-12, "clm_forward sums to " + std::to_string(total));
  }
}

// ---------------------------------------------------------------- 4

void feature_counts(Check& c) {
  SynthConfig cfg;
  cfg.name = "count-toy";
  cfg.length = 80;
  const OrdinalDataset toy = make_synthetic(cfg, 10, 0);

  TransformConfig rocket_cfg;
  rocket_cfg.variant = TransformVariant::rocket;
  const auto rocket_features = RocketTransform::fit(toy, rocket_cfg).apply(toy);
  c.require(rocket_features.cols() == 20000,
            "rocket emitted " + std::to_string(rocket_features.cols()));

  TransformConfig mini_cfg;
  mini_cfg.variant = TransformVariant::minirocket;
  const auto mini_features = MiniRocketTransform::fit(toy, mini_cfg).apply(toy);
  c.require(mini_features.cols() == 9996,
            "minirocket emitted " + std::to_string(mini_features.cols()));

  TransformConfig multi_cfg;
  multi_cfg.variant = TransformVariant::multirocket;
  const auto multi_features = MultiRocketTransform::fit(toy, multi_cfg).apply(toy);
  c.require(multi_features.cols() == 49728,
            "multirocket emitted " + std::to_string(multi_features.cols()));
  c.require(multi_features.cols() >= 49000 && multi_features.cols() <= 50176,
            "multirocket outside the documented window");
}

// ---------------------------------------------------------------- 5

void minirocket_determinism(Check& c) {
  const OrdinalDataset train = load_ts_file(standins_dir / "DistalPhalanxOAG_TRAIN.ts");
  const OrdinalDataset test = load_ts_file(standins_dir / "DistalPhalanxOAG_TEST.ts");

  TransformConfig cfg;
  cfg.variant = TransformVariant::minirocket;
  cfg.seed = 42;

  FitOptions options;
  options.num_classes = train.num_classes();

  std::vector<std::vector<int>> predictions;
  std::vector<Matrix> train_matrices, test_matrices;
  for (int run = 0; run < 2; ++run) {
    const MiniRocketTransform t = MiniRocketTransform::fit(train, cfg);
    const FeatureMatrix ftrain = t.apply(train);
    const FeatureMatrix ftest = t.apply(test);
    const LogisticATModel model = fit_logistic_at(ftrain.values, train.labels, 1.0, options);
    predictions.push_back(model.predict(ftest.values));
    train_matrices.push_back(ftrain.values);
    test_matrices.push_back(ftest.values);
  }
  c.require(train_matrices[0] == train_matrices[1], "train features differ between runs");
  c.require(test_matrices[0] == test_matrices[1], "test features differ between runs");
  c.require(predictions[0] == predictions[1], "predictions differ between runs");
}

// ---------------------------------------------------------------- 6

void metric_oracles(Check& c) {
  Rng rng(606);
  const std::size_t n = 250;
  std::vector<int> y(n), pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 1 + static_cast<int>(rng.next_below(5));
    pred[i] = 1 + static_cast<int>(rng.next_below(5));
  }
  double mean = 0.0;
  std::vector<int> shuffled(pred);
  for (int t = 0; t < 10000; ++t) {
    rng.shuffle(shuffled);
    mean += qwk(y, shuffled, 5);
  }
  mean /= 10000.0;
  c.require(std::abs(mean) <= 0.02, "permutation mean QWK " + std::to_string(mean));

  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t len = 1 + rng.next_below(60);
    const int q = 2 + static_cast<int>(rng.next_below(5));
    std::vector<int> a(len), b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = 1 + static_cast<int>(rng.next_below(q));
      b[i] = 1 + static_cast<int>(rng.next_below(q));
    }
    const double direct = one_off(a, b);
    const double banded = one_off_banded(confusion(a, b, q));
    c.require(std::abs(direct - banded) < 1e-14, "one_off route mismatch");
  }

  c.require(ccr({1, 2, 3}, {1, 3, 3}) == 2.0 / 3.0, "ccr example");
  c.require(mae({1, 2, 3}, {1, 3, 1}) == 1.0, "mae example");
  c.require(std::abs(qwk({1, 1, 2, 2}, {2, 2, 1, 1}, 2) - (-1.0)) < 1e-12, "qwk example");
  c.require(one_off({1, 2, 3}, {2, 3, 1}) == 2.0 / 3.0, "one_off example");
  c.require(qwk({1, 2, 3, 2}, {1, 2, 3, 2}) == 1.0, "perfect qwk example");
}

// ---------------------------------------------------------------- 7

void wilcoxon_correctness(Check& c) {
  Rng rng(707);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + rng.next_below(8);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      const double roll = rng.next_double();
      if (roll < 0.2) {
        b[i] = a[i];
      } else if (roll < 0.4) {
        b[i] = a[i] + (rng.next_double() < 0.5 ? 0.5 : -0.5);
      } else {
        b[i] = rng.normal();
      }
    }
    const double mine = wilcoxon_signed_rank(a, b).p_value;
    const double oracle = test::enumerate_exact_wilcoxon_p(a, b);
    c.require(std::abs(mine - oracle) < 1e-12,
              "exact p " + std::to_string(mine) + " vs oracle " + std::to_string(oracle));
  }

  const std::vector<double> adjusted = holm_adjust({0.01, 0.04});
  c.require(std::abs(adjusted[0] - 0.02) < 1e-12 && std::abs(adjusted[1] - 0.04) < 1e-12,
            "holm example mismatch");
}

// ---------------------------------------------------------------- 8

void directional_reproduction(Check& c, std::ostream& log) {
  RunManifest manifest;
  for (const StandIn& s : kPhalanx) {
    manifest.datasets.push_back({s.name, (standins_dir / (s.name + "_TRAIN.ts")).string(),
                                 (standins_dir / (s.name + "_TEST.ts")).string()});
  }
  MethodSpec ordinal;
  ordinal.name = "o_minirocket";
  ordinal.transform = "minirocket";
  ordinal.classifier = "logistic_at";
  MethodSpec nominal;
  nominal.name = "minirocket_logreg";
  nominal.transform = "minirocket";
  nominal.classifier = "multinomial";
  nominal.lambda = 1.0;  // the protocol cross-validates lambda for the ordinal classifier only
  manifest.methods = {ordinal, nominal};
  manifest.resamples = 10;
  manifest.metrics = {Metric::mae, Metric::ccr};
  manifest.output_dir = (fs::temp_directory_path() / "tsord_acceptance_run").string();
  manifest.seed = 7;
  fs::remove_all(manifest.output_dir);

  const ResultsTable table = run_experiment(manifest);
  c.require(table.failures.empty(), "experiment cells failed");

  const ScoreTable mae_table = per_dataset_means(table, Metric::mae);
  const ScoreTable ccr_table = per_dataset_means(table, Metric::ccr);
  const std::size_t ord_row =
      static_cast<std::size_t>(std::find(mae_table.methods.begin(), mae_table.methods.end(),
                                         "o_minirocket") -
                               mae_table.methods.begin());
  const std::size_t nom_row = 1 - ord_row;

  int mae_wins = 0;
  for (std::size_t d = 0; d < mae_table.datasets.size(); ++d) {
    const double ord = mae_table.values(ord_row, d);
    const double nom = mae_table.values(nom_row, d);
    log << "  " << mae_table.datasets[d] << ": ordinal MAE " << ord << ", nominal MAE " << nom
        << "\n";
    if (ord <= nom) ++mae_wins;
  }
  c.require(mae_wins >= 2, "ordinal MAE better on only " + std::to_string(mae_wins) + "/3");

  for (std::size_t d = 0; d < ccr_table.datasets.size(); ++d) {
    const OrdinalDataset test =
        load_ts_file(standins_dir / (ccr_table.datasets[d] + "_TEST.ts"));
    const std::vector<long> counts = test.class_counts();
    const double majority = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                            static_cast<double>(test.size());
    const double score = ccr_table.values(ord_row, d);
    log << "  " << ccr_table.datasets[d] << ": ordinal CCR " << score << ", majority rate "
        << majority << "\n";
    c.require(score > majority, ccr_table.datasets[d] + " CCR does not beat the majority rate");
  }
}

// ---------------------------------------------------------------- 9

void lambda_grid_fidelity(Check& c) {
  const std::vector<double> grid = lambda_grid();
  c.require(grid.size() == 10, "grid size " + std::to_string(grid.size()));
  for (int i = 0; i < 10; ++i) {
    const double want = std::pow(10.0, -3.0 + 6.0 * i / 9.0);
    c.require(std::abs(grid[static_cast<std::size_t>(i)] - want) <= 1e-15 * want,
              "grid point " + std::to_string(i) + " off");
  }

  Rng rng(909);
  const std::size_t n = 60;
  Matrix x(n, 3);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 1 + static_cast<int>(rng.next_below(3));
    x(i, 0) = y[i] + 0.5 * rng.normal();
    x(i, 1) = rng.normal();
    x(i, 2) = rng.normal();
  }
  const CVReport report = cross_validate_lambda(x, y);
  c.require(report.fold_mae.rows == 10 && report.fold_mae.cols == 5,
            "fold table is " + std::to_string(report.fold_mae.rows) + "x" +
                std::to_string(report.fold_mae.cols));
}

// ---------------------------------------------------------------- 10

std::string read_without_timing(const fs::path& csv) {
  std::ifstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t cut = line.size();
    for (int commas = 0; cut > 0; --cut) {
      if (line[cut - 1] == ',') {
        if (++commas == 2) break;
      }
    }
    out << line.substr(0, cut ? cut - 1 : 0) << "\n";
  }
  return out.str();
}

void end_to_end_determinism(Check& c) {
  const fs::path dir = fs::temp_directory_path() / "tsord_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SynthConfig cfg;
  cfg.name = "det";
  cfg.train_size = 30;
  cfg.test_size = 15;
  cfg.length = 40;
  cfg.classes = 3;
  const SplitPair split = make_synthetic_split(cfg);
  write_ts_file(split.train, dir / "det_TRAIN.ts");
  write_ts_file(split.test, dir / "det_TEST.ts");

  RunManifest manifest;
  manifest.datasets = {{"det", (dir / "det_TRAIN.ts").string(), (dir / "det_TEST.ts").string()}};
  MethodSpec mini;
  mini.name = "o_minirocket";
  mini.num_features = 840;
  MethodSpec naive;
  naive.name = "logreg";
  naive.transform = "flatten";
  naive.classifier = "multinomial";
  manifest.methods = {mini, naive};  // both cross-validate lambda
  manifest.resamples = 2;
  manifest.seed = 3;

  std::vector<std::string> ledgers;
  for (int round = 0; round < 2; ++round) {
    manifest.output_dir = (dir / ("results" + std::to_string(round))).string();
    const ResultsTable table = run_experiment(manifest);
    c.require(table.failures.empty(), "run had failures");
    ledgers.push_back(read_without_timing(fs::path(manifest.output_dir) / "results.csv"));
  }
  c.require(!ledgers[0].empty(), "empty ledger");
  c.require(ledgers[0] == ledgers[1], "ledgers differ between identical runs");
}

}  // namespace

int main() {
  make_standins();

  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&, std::ostream&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient oracles match finite differences",
       [](Check& c, std::ostream&) { gradient_oracles(c); }},
      {2, "fitted and constructed thresholds are ordered",
       [](Check& c, std::ostream&) { threshold_ordering(c); }},
      {3, "class probabilities form a simplex",
       [](Check& c, std::ostream&) { probability_simplex(c); }},
      {4, "default transforms emit the contracted feature counts",
       [](Check& c, std::ostream&) { feature_counts(c); }},
      {5, "minirocket transform+fit is bit-reproducible",
       [](Check& c, std::ostream&) { minirocket_determinism(c); }},
      {6, "metric oracles (permutation QWK, banded 1-OFF, hand examples)",
       [](Check& c, std::ostream&) { metric_oracles(c); }},
      {7, "signed-rank exact distribution and Holm step-down",
       [](Check& c, std::ostream&) { wilcoxon_correctness(c); }},
      {8, "ordinal beats nominal on the phalanx-shaped problems",
       [](Check& c, std::ostream& log) { directional_reproduction(c, log); }},
      {9, "lambda grid and fold table shapes",
       [](Check& c, std::ostream&) { lambda_grid_fidelity(c); }},
      {10, "repeated runs give identical ledgers",
       [](Check& c, std::ostream&) { end_to_end_determinism(c); }},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check check;
    std::ostringstream log;
    try {
      criterion.run(check, log);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s (%.1fs)%s\n", criterion.id,
                check.ok ? "PASS" : "FAIL", criterion.name, seconds,
                check.ok ? "" : ("  -- " + check.detail).c_str());
    if (!log.str().empty()) std::fputs(log.str().c_str(), stdout);
    std::fflush(stdout);
    failures += !check.ok;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
