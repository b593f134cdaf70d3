#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsord/dataset.hpp"
#include "tsord/harness.hpp"
#include "tsord/io.hpp"
#include "tsord/logistic_at.hpp"
#include "tsord/metrics.hpp"
#include "tsord/multinomial.hpp"
#include "tsord/stats.hpp"
#include "tsord/synth.hpp"
#include "tsord/transform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsord;

namespace {

json score_json(const ScoreTable& table) {
  json out;
  out["methods"] = table.methods;
  out["datasets"] = table.datasets;
  json values = json::array();
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    json row = json::array();
    for (std::size_t d = 0; d < table.datasets.size(); ++d) {
      const double v = table.values(m, d);
      if (std::isnan(v)) {
        row.push_back(nullptr);
      } else {
        row.push_back(v);
      }
    }
    values.push_back(std::move(row));
  }
  out["values"] = std::move(values);
  return out;
}

int run_command(const std::string& manifest_path, int workers) {
  const RunManifest manifest = load_manifest(manifest_path);
  RunOptions options;
  options.workers = workers;
  options.log = &std::cerr;
  const ResultsTable table = run_experiment(manifest, options);
  std::cout << "records: " << table.records.size() << "\n";
  std::cout << "failures: " << table.failures.size() << "\n";
  std::cout << "results: " << (fs::path(manifest.output_dir) / "results.csv").string() << "\n";
  return table.failures.empty() ? 0 : 2;
}

int stats_command(const std::string& results_dir, const std::string& metric_name,
                  const std::string& report, const std::string& relmae_form, bool pair_by_cell,
                  double alpha) {
  const Metric metric = metric_from_string(metric_name);
  const bool lower = metric_lower_is_better(metric);
  const ResultsTable table = load_results_dir(results_dir);
  const ScoreTable score =
      pair_by_cell ? per_cell_values(table, metric) : per_dataset_means(table, metric);

  const fs::path report_dir = fs::path(results_dir) / "reports";
  fs::create_directories(report_dir);
  const std::string suffix = std::string(to_string(metric)) + ".json";

  if (report == "pairwise") {
    std::vector<json> rows;
    std::vector<double> raw;
    for (std::size_t a = 0; a < score.methods.size(); ++a) {
      for (std::size_t b = a + 1; b < score.methods.size(); ++b) {
        std::vector<double> va, vb;
        for (std::size_t d = 0; d < score.datasets.size(); ++d) {
          if (std::isnan(score.values(a, d)) || std::isnan(score.values(b, d))) continue;
          va.push_back(score.values(a, d));
          vb.push_back(score.values(b, d));
        }
        const WilcoxonResult w = wilcoxon_signed_rank(va, vb);
        raw.push_back(w.p_value);
        rows.push_back({{"a", score.methods[a]},
                        {"b", score.methods[b]},
                        {"p", w.p_value},
                        {"n", w.n_effective},
                        {"exact", w.exact},
                        {"degenerate", w.degenerate}});
      }
    }
    const std::vector<double> adjusted = holm_adjust(raw);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i]["holm_adjusted_p"] = adjusted[i];
      rows[i]["significant"] = adjusted[i] < alpha;
    }
    std::ofstream out(report_dir / ("pairwise_" + suffix));
    out << json{{"alpha", alpha}, {"pairs", rows}}.dump(2) << "\n";
    std::cout << render_pairwise(score, lower, alpha);
  } else if (report == "cdd") {
    std::vector<std::string> warnings;
    const std::vector<double> ranks = mean_ranks(score, lower, &warnings);
    const auto cliques = build_cliques(score, lower, alpha);
    json doc{{"alpha", alpha}, {"warnings", warnings}};
    for (std::size_t m = 0; m < score.methods.size(); ++m) {
      doc["mean_ranks"][score.methods[m]] = ranks[m];
    }
    json clique_json = json::array();
    for (const auto& clique : cliques) {
      json names = json::array();
      for (const int m : clique) names.push_back(score.methods[static_cast<std::size_t>(m)]);
      clique_json.push_back(std::move(names));
    }
    doc["cliques"] = std::move(clique_json);
    std::ofstream out(report_dir / ("cdd_" + suffix));
    out << doc.dump(2) << "\n";
    std::cout << render_cdd(score, lower, alpha);
  } else if (report == "mcm") {
    const auto cells = mcm(score, lower);
    json rows = json::array();
    for (std::size_t a = 0; a < score.methods.size(); ++a) {
      for (std::size_t b = 0; b < score.methods.size(); ++b) {
        if (a == b) continue;
        rows.push_back({{"a", score.methods[a]},
                        {"b", score.methods[b]},
                        {"mean_diff", cells[a][b].mean_diff},
                        {"wins", cells[a][b].wins},
                        {"ties", cells[a][b].ties},
                        {"losses", cells[a][b].losses},
                        {"p", cells[a][b].p_value},
                        {"degenerate", cells[a][b].degenerate}});
      }
    }
    std::ofstream out(report_dir / ("mcm_" + suffix));
    out << json{{"cells", rows}}.dump(2) << "\n";
    std::cout << render_mcm(score, lower);
  } else if (report == "relmae") {
    if (metric != Metric::mae) throw std::invalid_argument("relmae report requires --metric mae");
    const RelMaeForm form = relmae_form == "ratio" ? RelMaeForm::ratio : RelMaeForm::shifted;
    const Matrix rel = relative_mae(score, form);
    ScoreTable rel_table = score;
    rel_table.values = rel;
    json doc = score_json(rel_table);
    doc["form"] = relmae_form;
    std::ofstream out(report_dir / ("relmae_" + suffix));
    out << doc.dump(2) << "\n";
    std::cout << render_relmae(score, form);
  } else {
    throw std::invalid_argument("unknown report '" + report + "'");
  }
  return 0;
}

int transform_command(const std::string& train_path, const std::string& test_path,
                      const std::string& variant, int num_kernels, int num_features,
                      std::uint64_t seed, const std::string& out_dir) {
  const OrdinalDataset train = load_ts_file(train_path);
  TransformConfig config;
  config.variant = transform_variant_from_string(variant);
  config.num_kernels = num_kernels;
  config.num_features = num_features;
  config.seed = seed;

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  FeatureMatrix train_features, test_features;
  OrdinalDataset test;
  const bool with_test = !test_path.empty();
  if (with_test) test = load_ts_file(test_path);

  switch (config.variant) {
    case TransformVariant::rocket: {
      const RocketTransform t = RocketTransform::fit(train, config);
      train_features = t.apply(train);
      if (with_test) test_features = t.apply(test);
      break;
    }
    case TransformVariant::minirocket: {
      const MiniRocketTransform t = MiniRocketTransform::fit(train, config);
      train_features = t.apply(train);
      if (with_test) test_features = t.apply(test);
      break;
    }
    case TransformVariant::multirocket: {
      const MultiRocketTransform t = MultiRocketTransform::fit(train, config);
      train_features = t.apply(train);
      if (with_test) test_features = t.apply(test);
      break;
    }
  }

  write_features_csv(train_features, train.labels, dir / "train_features.csv");
  write_column_meta(train_features, dir / "features_meta.json");
  if (with_test) write_features_csv(test_features, test.labels, dir / "test_features.csv");
  std::cout << "features: " << train_features.cols() << " columns, hash "
            << feature_provenance_hash(train_features) << "\n";
  return 0;
}

int fit_command(const std::string& features_path, const std::string& classifier,
                const std::string& lambda_arg, std::uint64_t seed, const std::string& model_path) {
  const auto [features, labels] = read_features_csv(features_path);
  FitOptions options;

  double lambda = -1.0;
  if (lambda_arg != "cv") lambda = std::stod(lambda_arg);
  const ClassifierKind kind =
      classifier == "multinomial" ? ClassifierKind::multinomial : ClassifierKind::logistic_at;
  if (lambda < 0.0) {
    const CVReport report = cross_validate_lambda(features.values, labels, kind, seed, options);
    lambda = report.chosen_lambda;
    std::cout << "chosen lambda: " << lambda << " (" << report.folds << " folds)\n";
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  }

  if (kind == ClassifierKind::logistic_at) {
    LogisticATModel model = fit_logistic_at(features.values, labels, lambda, options);
    model.seed = seed;
    model.feature_hash = feature_provenance_hash(features);
    save_model(model, model_path);
  } else {
    MultinomialModel model = fit_multinomial(features.values, labels, lambda, options);
    model.seed = seed;
    model.feature_hash = feature_provenance_hash(features);
    save_model(model, model_path);
  }
  std::cout << "model: " << model_path << "\n";
  return 0;
}

int predict_command(const std::string& model_path, const std::string& features_path,
                    const std::string& out_path) {
  const LoadedModel model = load_model(model_path);
  const auto [features, labels] = read_features_csv(features_path);
  const std::vector<int> predictions = model.predict(features.values);

  std::ofstream out(out_path);
  out << "prediction\n";
  for (const int p : predictions) out << p << "\n";

  const bool labeled = std::any_of(labels.begin(), labels.end(), [](int y) { return y != 0; });
  if (labeled) {
    const int q = model.type == ModelType::logistic_at ? model.logistic_at.num_classes
                                                       : model.multinomial.num_classes;
    std::cout << "ccr " << ccr(labels, predictions) << "\n";
    std::cout << "mae " << mae(labels, predictions) << "\n";
    std::cout << "qwk " << qwk(labels, predictions, q) << "\n";
    std::cout << "one_off " << one_off(labels, predictions) << "\n";
  }
  std::cout << "predictions: " << out_path << "\n";
  return 0;
}

int synth_command(const std::string& out_dir, const std::string& name, int train, int test,
                  int length, int channels, int classes, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.name = name;
  cfg.train_size = train;
  cfg.test_size = test;
  cfg.length = length;
  cfg.channels = channels;
  cfg.classes = classes;
  cfg.seed = seed;
  const SplitPair split = make_synthetic_split(cfg);
  fs::create_directories(out_dir);
  write_ts_file(split.train, fs::path(out_dir) / (name + "_TRAIN.ts"));
  write_ts_file(split.test, fs::path(out_dir) / (name + "_TEST.ts"));
  std::cout << "wrote " << name << "_TRAIN.ts / " << name << "_TEST.ts under " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time series ordinal classification toolkit"};
  app.require_subcommand(1);

  // run
  std::string manifest_path;
  int workers = 0;
  CLI::App* run = app.add_subcommand("run", "run a benchmark manifest");
  run->add_option("manifest", manifest_path, "manifest JSON")->required();
  run->add_option("--workers", workers, "worker pool size (default: TSORD_WORKERS or all cores)");

  // stats
  std::string results_dir, metric_name = "mae", report = "cdd", relmae_form = "shifted";
  bool pair_by_cell = false;
  double alpha = 0.05;
  CLI::App* stats = app.add_subcommand("stats", "statistics over a results directory");
  stats->add_option("results_dir", results_dir)->required();
  stats->add_option("--metric", metric_name, "ccr|mae|qwk|one_off");
  stats->add_option("--report", report, "cdd|mcm|relmae|pairwise");
  stats->add_option("--relmae-form", relmae_form, "shifted|ratio");
  stats->add_flag("--pair-by-cell", pair_by_cell, "pair tests per (dataset, resample)");
  stats->add_option("--alpha", alpha, "significance level");

  // transform
  std::string train_path, test_path, variant = "minirocket", out_dir = "features";
  int num_kernels = 10000, num_features = 0;
  std::uint64_t seed = 0;
  CLI::App* transform = app.add_subcommand("transform", "write convolutional features to CSV");
  transform->add_option("--train", train_path)->required();
  transform->add_option("--test", test_path);
  transform->add_option("--variant", variant, "rocket|minirocket|multirocket");
  transform->add_option("--num-kernels", num_kernels, "rocket kernel count");
  transform->add_option("--num-features", num_features, "mini/multirocket feature budget");
  transform->add_option("--seed", seed);
  transform->add_option("--out", out_dir);

  // fit
  std::string features_path, classifier = "logistic_at", lambda_arg = "cv",
              model_path = "model.json";
  CLI::App* fit = app.add_subcommand("fit", "fit a classifier on a feature CSV");
  fit->add_option("--features", features_path)->required();
  fit->add_option("--classifier", classifier, "logistic_at|multinomial");
  fit->add_option("--lambda", lambda_arg, "regularization value, or 'cv'");
  fit->add_option("--seed", seed);
  fit->add_option("--out", model_path);

  // predict
  std::string predict_model, predict_features, predictions_path = "predictions.csv";
  CLI::App* predict = app.add_subcommand("predict", "predict labels from a model and features");
  predict->add_option("--model", predict_model)->required();
  predict->add_option("--features", predict_features)->required();
  predict->add_option("--out", predictions_path);

  // synth
  std::string synth_dir = "data", synth_name = "synthetic";
  int synth_train = 60, synth_test = 30, synth_length = 64, synth_channels = 1, synth_classes = 3;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic ordinal demo dataset");
  synth->add_option("--out", synth_dir);
  synth->add_option("--name", synth_name);
  synth->add_option("--train-size", synth_train);
  synth->add_option("--test-size", synth_test);
  synth->add_option("--length", synth_length);
  synth->add_option("--channels", synth_channels);
  synth->add_option("--classes", synth_classes);
  synth->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(manifest_path, workers);
    if (stats->parsed()) {
      return stats_command(results_dir, metric_name, report, relmae_form, pair_by_cell, alpha);
    }
    if (transform->parsed()) {
      return transform_command(train_path, test_path, variant, num_kernels, num_features, seed,
                               out_dir);
    }
    if (fit->parsed()) return fit_command(features_path, classifier, lambda_arg, seed, model_path);
    if (predict->parsed()) return predict_command(predict_model, predict_features, predictions_path);
    if (synth->parsed()) {
      return synth_command(synth_dir, synth_name, synth_train, synth_test, synth_length,
                           synth_channels, synth_classes, seed);
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
