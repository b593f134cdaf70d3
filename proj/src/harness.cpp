#include "tsord/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "tsord/dataset.hpp"
#include "tsord/logistic_at.hpp"
#include "tsord/multinomial.hpp"
#include "tsord/rng.hpp"
#include "tsord/transform.hpp"

namespace tsord {

using nlohmann::json;
namespace fs = std::filesystem;

void RunManifest::validate() const {
  if (datasets.empty()) throw std::invalid_argument("manifest: no datasets");
  if (methods.empty()) throw std::invalid_argument("manifest: no methods");
  if (resamples < 1) throw std::invalid_argument("manifest: resamples must be >= 1");
  if (metrics.empty()) throw std::invalid_argument("manifest: no metrics");
  std::set<std::string> names;
  for (const MethodSpec& m : methods) {
    if (!names.insert(m.name).second) {
      throw std::invalid_argument("manifest: duplicate method name '" + m.name + "'");
    }
    if (m.transform != "flatten") transform_variant_from_string(m.transform);
    if (m.classifier != "logistic_at" && m.classifier != "multinomial") {
      throw std::invalid_argument("manifest: unknown classifier '" + m.classifier + "'");
    }
  }
  std::set<std::string> dnames;
  for (const DatasetSpec& d : datasets) {
    if (!dnames.insert(d.name).second) {
      throw std::invalid_argument("manifest: duplicate dataset name '" + d.name + "'");
    }
  }
}

RunManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc = json::parse(in);

  RunManifest m;
  for (const json& d : doc.at("datasets")) {
    DatasetSpec spec;
    spec.name = d.at("name").get<std::string>();
    spec.train_path = d.at("train").get<std::string>();
    spec.test_path = d.at("test").get<std::string>();
    if (d.contains("discretize")) {
      const json& disc = d.at("discretize");
      if (disc.contains("thresholds")) {
        spec.discretize_thresholds = disc.at("thresholds").get<std::vector<double>>();
      } else if (disc.contains("bins")) {
        spec.discretize_bins = disc.at("bins").get<int>();
      } else {
        throw std::invalid_argument("manifest: discretize needs 'thresholds' or 'bins'");
      }
    }
    m.datasets.push_back(std::move(spec));
  }
  for (const json& j : doc.at("methods")) {
    MethodSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.transform = j.value("transform", spec.transform);
    spec.classifier = j.value("classifier", spec.classifier);
    if (j.contains("lambda") && j.at("lambda").is_number()) {
      spec.lambda = j.at("lambda").get<double>();
    }
    spec.num_kernels = j.value("num_kernels", spec.num_kernels);
    spec.num_features = j.value("num_features", spec.num_features);
    m.methods.push_back(std::move(spec));
  }
  m.resamples = doc.value("resamples", 30);
  if (doc.contains("metrics")) {
    m.metrics.clear();
    for (const json& s : doc.at("metrics")) m.metrics.push_back(metric_from_string(s.get<std::string>()));
  }
  m.output_dir = doc.value("output_dir", std::string("results"));
  m.seed = doc.value("seed", 0ull);
  m.validate();
  return m;
}

namespace {

int metric_order(Metric m) { return static_cast<int>(m); }

bool record_less(const ResultRecord& a, const ResultRecord& b) {
  if (a.method != b.method) return a.method < b.method;
  if (a.dataset != b.dataset) return a.dataset < b.dataset;
  if (a.resample != b.resample) return a.resample < b.resample;
  return metric_order(a.metric) < metric_order(b.metric);
}

std::string format_record(const ResultRecord& r) {
  char value[40], fit[40], predict[40];
  std::snprintf(value, sizeof value, "%.17g", r.value);
  std::snprintf(fit, sizeof fit, "%.3f", r.fit_ms);
  std::snprintf(predict, sizeof predict, "%.3f", r.predict_ms);
  std::ostringstream line;
  line << r.method << ',' << r.dataset << ',' << r.resample << ',' << to_string(r.metric) << ','
       << value << ',' << fit << ',' << predict;
  return line.str();
}

constexpr const char* kCsvHeader = "method,dataset,resample,metric,value,fit_ms,predict_ms";

}  // namespace

const ResultRecord* ResultsTable::find(const std::string& method, const std::string& dataset,
                                       int resample, Metric metric) const {
  for (const ResultRecord& r : records) {
    if (r.resample == resample && r.metric == metric && r.method == method && r.dataset == dataset) {
      return &r;
    }
  }
  return nullptr;
}

std::vector<std::string> ResultsTable::method_names() const {
  std::vector<std::string> out;
  for (const ResultRecord& r : records) {
    if (std::find(out.begin(), out.end(), r.method) == out.end()) out.push_back(r.method);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ResultsTable::dataset_names() const {
  std::vector<std::string> out;
  for (const ResultRecord& r : records) {
    if (std::find(out.begin(), out.end(), r.dataset) == out.end()) out.push_back(r.dataset);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ResultsTable::sort() { std::sort(records.begin(), records.end(), record_less); }

ResultsTable load_results_csv(const fs::path& path) {
  ResultsTable table;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("method,", 0) == 0) continue;
    std::istringstream ss(line);
    std::string method, dataset, resample, metric, value, fit, predict;
    if (!std::getline(ss, method, ',') || !std::getline(ss, dataset, ',') ||
        !std::getline(ss, resample, ',') || !std::getline(ss, metric, ',') ||
        !std::getline(ss, value, ',') || !std::getline(ss, fit, ',') ||
        !std::getline(ss, predict, ',')) {
      continue;  // interrupted final line from a crashed run
    }
    try {
      ResultRecord r;
      r.method = method;
      r.dataset = dataset;
      r.resample = std::stoi(resample);
      r.metric = metric_from_string(metric);
      r.value = std::stod(value);
      r.fit_ms = std::stod(fit);
      r.predict_ms = std::stod(predict);
      table.records.push_back(std::move(r));
    } catch (const std::exception&) {
      continue;
    }
  }
  return table;
}

ResultsTable load_results_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .csv files in " + dir.string());

  ResultsTable merged;
  std::set<std::tuple<std::string, std::string, int, int>> seen;
  for (const fs::path& f : files) {
    ResultsTable t = load_results_csv(f);
    for (ResultRecord& r : t.records) {
      if (seen.insert({r.method, r.dataset, r.resample, metric_order(r.metric)}).second) {
        merged.records.push_back(std::move(r));
      }
    }
  }
  merged.sort();
  return merged;
}

void write_results_csv(const ResultsTable& table, const fs::path& path) {
  ResultsTable sorted = table;
  sorted.sort();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << kCsvHeader << "\n";
  for (const ResultRecord& r : sorted.records) out << format_record(r) << "\n";
}

namespace {

struct CellOutcome {
  std::vector<ResultRecord> records;
  bool failed = false;
  std::string reason;
};

CellOutcome run_cell(const RunManifest& manifest, const MethodSpec& method,
                     const DatasetSpec& dataset_spec, const OrdinalDataset& default_train,
                     const OrdinalDataset& default_test, int resample) {
  using clock = std::chrono::steady_clock;
  CellOutcome out;
  try {
    const SplitPair split = stratified_resample(default_train, default_test, resample);
    const int q = split.train.num_classes();
    // Keyed by (manifest seed, dataset, resample) only, so every method in a
    // cell sees the same transform randomness and comparisons stay paired.
    const std::uint64_t cell_seed =
        Rng(manifest.seed, hash64(dataset_spec.name), static_cast<std::uint64_t>(resample)).next_u64();

    // Fit phase: feature step fitted and applied to train, lambda selection,
    // classifier fit. Predict phase: feature step applied to test, prediction.
    const auto fit_start = clock::now();

    std::function<FeatureMatrix(const OrdinalDataset&)> featurize;
    if (method.transform == "flatten") {
      featurize = [](const OrdinalDataset& d) { return flatten(d); };
    } else {
      TransformConfig config;
      config.variant = transform_variant_from_string(method.transform);
      config.num_kernels = method.num_kernels;
      config.num_features = method.num_features;
      config.seed = cell_seed;
      switch (config.variant) {
        case TransformVariant::rocket: {
          auto t = std::make_shared<RocketTransform>(RocketTransform::fit(split.train, config));
          featurize = [t](const OrdinalDataset& d) { return t->apply(d); };
          break;
        }
        case TransformVariant::minirocket: {
          auto t = std::make_shared<MiniRocketTransform>(MiniRocketTransform::fit(split.train, config));
          featurize = [t](const OrdinalDataset& d) { return t->apply(d); };
          break;
        }
        case TransformVariant::multirocket: {
          auto t = std::make_shared<MultiRocketTransform>(MultiRocketTransform::fit(split.train, config));
          featurize = [t](const OrdinalDataset& d) { return t->apply(d); };
          break;
        }
      }
    }
    const FeatureMatrix train_features = featurize(split.train);

    FitOptions options;
    options.num_classes = q;
    double lambda = method.lambda;
    const ClassifierKind kind = method.classifier == "multinomial" ? ClassifierKind::multinomial
                                                                   : ClassifierKind::logistic_at;
    if (lambda < 0.0) {
      lambda = cross_validate_lambda(train_features.values, split.train.labels, kind, cell_seed,
                                     options)
                   .chosen_lambda;
    }

    std::vector<int> predictions;
    double fit_ms = 0.0, predict_ms = 0.0;
    if (kind == ClassifierKind::logistic_at) {
      LogisticATModel model = fit_logistic_at(train_features.values, split.train.labels, lambda, options);
      const auto fit_end = clock::now();
      fit_ms = std::chrono::duration<double, std::milli>(fit_end - fit_start).count();
      predictions = model.predict(featurize(split.test).values);
      predict_ms = std::chrono::duration<double, std::milli>(clock::now() - fit_end).count();
    } else {
      MultinomialModel model = fit_multinomial(train_features.values, split.train.labels, lambda, options);
      const auto fit_end = clock::now();
      fit_ms = std::chrono::duration<double, std::milli>(fit_end - fit_start).count();
      predictions = model.predict(featurize(split.test).values);
      predict_ms = std::chrono::duration<double, std::milli>(clock::now() - fit_end).count();
    }

    out.records.clear();
    for (const Metric metric : manifest.metrics) {
      ResultRecord r;
      r.method = method.name;
      r.dataset = dataset_spec.name;
      r.resample = resample;
      r.metric = metric;
      r.value = evaluate_metric(metric, split.test.labels, predictions, q);
      r.fit_ms = fit_ms;
      r.predict_ms = predict_ms;
      out.records.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.reason = e.what();
    out.records.clear();
  }
  return out;
}

}  // namespace

ResultsTable run_experiment(const RunManifest& manifest, const RunOptions& options) {
  manifest.validate();
  const fs::path out_dir(manifest.output_dir);
  fs::create_directories(out_dir);
  const fs::path csv_path = out_dir / "results.csv";

  // Resume: cells already holding every requested metric are kept as-is.
  ResultsTable table;
  std::set<std::tuple<std::string, std::string, int>> completed;
  if (fs::exists(csv_path)) {
    ResultsTable previous = load_results_csv(csv_path);
    std::map<std::tuple<std::string, std::string, int>, std::vector<ResultRecord>> cells;
    for (ResultRecord& r : previous.records) {
      cells[{r.method, r.dataset, r.resample}].push_back(std::move(r));
    }
    for (auto& [key, records] : cells) {
      std::set<int> have;
      for (const ResultRecord& r : records) have.insert(metric_order(r.metric));
      bool complete = true;
      for (const Metric m : manifest.metrics) complete = complete && have.count(metric_order(m));
      if (complete) {
        completed.insert(key);
        for (ResultRecord& r : records) table.records.push_back(std::move(r));
      }
    }
  }

  // Datasets load once; a broken dataset fails all of its cells.
  std::vector<SplitPair> defaults(manifest.datasets.size());
  std::vector<std::string> dataset_error(manifest.datasets.size());
  for (std::size_t d = 0; d < manifest.datasets.size(); ++d) {
    const DatasetSpec& spec = manifest.datasets[d];
    try {
      if (!spec.discretize_thresholds.empty()) {
        defaults[d].train = discretize_targets(load_ts_regression_file(spec.train_path),
                                               spec.discretize_thresholds);
        defaults[d].test = discretize_targets(load_ts_regression_file(spec.test_path),
                                              spec.discretize_thresholds);
      } else if (spec.discretize_bins > 0) {
        std::tie(defaults[d].train, defaults[d].test) =
            discretize_targets_uniform(load_ts_regression_file(spec.train_path),
                                       load_ts_regression_file(spec.test_path), spec.discretize_bins);
      } else {
        defaults[d].train = load_ts_file(spec.train_path);
        defaults[d].test = load_ts_file(spec.test_path);
      }
      if (defaults[d].train.class_names != defaults[d].test.class_names) {
        throw std::invalid_argument("train/test class label mismatch");
      }
      defaults[d].train.name = spec.name;
      defaults[d].test.name = spec.name;
    } catch (const std::exception& e) {
      dataset_error[d] = e.what();
    }
  }

  struct Cell {
    std::size_t dataset, method;
    int resample;
  };
  std::vector<Cell> pending;
  for (std::size_t d = 0; d < manifest.datasets.size(); ++d) {
    for (int r = 0; r < manifest.resamples; ++r) {
      for (std::size_t m = 0; m < manifest.methods.size(); ++m) {
        if (!completed.count({manifest.methods[m].name, manifest.datasets[d].name, r})) {
          pending.push_back({d, m, r});
        }
      }
    }
  }

  int workers = options.workers;
  if (workers <= 0) {
    if (const char* env = std::getenv("TSORD_WORKERS")) workers = std::atoi(env);
  }
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#else
  if (workers <= 0) workers = 1;
#endif

  const bool fresh_ledger = !fs::exists(csv_path);
  std::ofstream append(csv_path, std::ios::app);
  if (!append) throw std::runtime_error("cannot open " + csv_path.string() + " for append");
  if (fresh_ledger) append << kCsvHeader << "\n";

  std::mutex ledger_mutex;
  long done_count = 0;

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long idx = 0; idx < static_cast<long>(pending.size()); ++idx) {
    const Cell cell = pending[static_cast<std::size_t>(idx)];
    const DatasetSpec& dspec = manifest.datasets[cell.dataset];
    const MethodSpec& mspec = manifest.methods[cell.method];

    CellOutcome outcome;
    if (!dataset_error[cell.dataset].empty()) {
      outcome.failed = true;
      outcome.reason = dataset_error[cell.dataset];
    } else {
      outcome = run_cell(manifest, mspec, dspec, defaults[cell.dataset].train,
                         defaults[cell.dataset].test, cell.resample);
    }

    {
      const std::lock_guard<std::mutex> lock(ledger_mutex);
      if (outcome.failed) {
        table.failures.push_back({mspec.name, dspec.name, cell.resample, outcome.reason});
      } else {
        for (const ResultRecord& r : outcome.records) append << format_record(r) << "\n";
        append.flush();
        for (ResultRecord& r : outcome.records) table.records.push_back(std::move(r));
      }
      ++done_count;
      if (options.log) {
        (*options.log) << "[" << done_count << "/" << pending.size() << "] " << mspec.name << " / "
                       << dspec.name << " / resample " << cell.resample
                       << (outcome.failed ? " FAILED: " + outcome.reason : "") << "\n";
        options.log->flush();
      }
    }
  }
  append.close();

  table.sort();
  write_results_csv(table, csv_path);

  if (!table.failures.empty() || fs::exists(out_dir / "errors.json")) {
    json errors = json::array();
    for (const CellFailure& f : table.failures) {
      errors.push_back(
          {{"method", f.method}, {"dataset", f.dataset}, {"resample", f.resample}, {"reason", f.reason}});
    }
    std::ofstream err(out_dir / "errors.json");
    err << errors.dump(2) << "\n";
  }

  json summary{{"datasets", manifest.datasets.size()},
               {"methods", manifest.methods.size()},
               {"resamples", manifest.resamples},
               {"records", table.records.size()},
               {"failures", table.failures.size()},
               {"seed", manifest.seed},
               {"per_dataset_aggregation", "mean over resamples"}};
  std::ofstream summary_out(out_dir / "summary.json");
  summary_out << summary.dump(2) << "\n";

  return table;
}

ScoreTable per_dataset_means(const ResultsTable& table, Metric metric) {
  ScoreTable score;
  score.methods = table.method_names();
  score.datasets = table.dataset_names();
  score.values = Matrix(score.methods.size(), score.datasets.size(),
                        std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < score.methods.size(); ++m) {
    for (std::size_t d = 0; d < score.datasets.size(); ++d) {
      double acc = 0.0;
      long count = 0;
      for (const ResultRecord& r : table.records) {
        if (r.metric == metric && r.method == score.methods[m] && r.dataset == score.datasets[d]) {
          acc += r.value;
          ++count;
        }
      }
      if (count > 0) score.values(m, d) = acc / static_cast<double>(count);
    }
  }
  return score;
}

ScoreTable per_cell_values(const ResultsTable& table, Metric metric) {
  ScoreTable score;
  score.methods = table.method_names();
  std::set<std::pair<std::string, int>> cells;
  for (const ResultRecord& r : table.records) {
    if (r.metric == metric) cells.insert({r.dataset, r.resample});
  }
  for (const auto& [dataset, resample] : cells) {
    score.datasets.push_back(dataset + ":" + std::to_string(resample));
  }
  score.values = Matrix(score.methods.size(), score.datasets.size(),
                        std::numeric_limits<double>::quiet_NaN());
  for (const ResultRecord& r : table.records) {
    if (r.metric != metric) continue;
    const auto mit = std::find(score.methods.begin(), score.methods.end(), r.method);
    const std::string key = r.dataset + ":" + std::to_string(r.resample);
    const auto dit = std::find(score.datasets.begin(), score.datasets.end(), key);
    score.values(static_cast<std::size_t>(mit - score.methods.begin()),
                 static_cast<std::size_t>(dit - score.datasets.begin())) = r.value;
  }
  return score;
}

std::string render_pairwise(const ScoreTable& table, bool lower_is_better, double alpha) {
  (void)lower_is_better;
  std::ostringstream out;
  const std::size_t k = table.methods.size();
  std::vector<double> p;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<double> va, vb;
      for (std::size_t d = 0; d < table.datasets.size(); ++d) {
        if (std::isnan(table.at(a, d)) || std::isnan(table.at(b, d))) continue;
        va.push_back(table.at(a, d));
        vb.push_back(table.at(b, d));
      }
      p.push_back(wilcoxon_signed_rank(va, vb).p_value);
      pairs.emplace_back(a, b);
    }
  }
  const std::vector<double> adjusted = holm_adjust(p);
  out << "pairwise signed-rank tests (alpha " << alpha << ", Holm-adjusted)\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out << "  " << table.methods[pairs[i].first] << " vs " << table.methods[pairs[i].second]
        << ": p=" << p[i] << " adjusted=" << adjusted[i]
        << (adjusted[i] < alpha ? "  [significant]" : "") << "\n";
  }
  return out.str();
}

std::string render_cdd(const ScoreTable& table, bool lower_is_better, double alpha) {
  std::ostringstream out;
  std::vector<std::string> warnings;
  const std::vector<double> ranks = mean_ranks(table, lower_is_better, &warnings);
  const auto cliques = build_cliques(table, lower_is_better, alpha);

  std::vector<std::size_t> order(ranks.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

  out << "mean ranks (1 = best)\n";
  for (const std::size_t m : order) {
    out << "  " << table.methods[m] << ": " << ranks[m] << "\n";
  }
  out << "cliques (no Holm-significant difference inside a group, alpha " << alpha << ")\n";
  for (const auto& clique : cliques) {
    out << "  {";
    for (std::size_t i = 0; i < clique.size(); ++i) {
      out << (i ? ", " : " ") << table.methods[static_cast<std::size_t>(clique[i])];
    }
    out << " }\n";
  }
  for (const std::string& w : warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string render_mcm(const ScoreTable& table, bool lower_is_better) {
  const auto cells = mcm(table, lower_is_better);
  std::ostringstream out;
  out << "multi-comparison matrix (row vs column: mean diff / W-T-L / p)\n";
  for (std::size_t a = 0; a < table.methods.size(); ++a) {
    for (std::size_t b = 0; b < table.methods.size(); ++b) {
      if (a == b) continue;
      const McmCell& c = cells[a][b];
      out << "  " << table.methods[a] << " vs " << table.methods[b] << ": " << c.mean_diff << " / "
          << c.wins << "-" << c.ties << "-" << c.losses << " / "
          << (c.degenerate ? std::string("degenerate") : std::to_string(c.p_value)) << "\n";
    }
  }
  return out.str();
}

std::string render_relmae(const ScoreTable& table, RelMaeForm form) {
  const Matrix rel = relative_mae(table, form);
  std::ostringstream out;
  const double neutral = form == RelMaeForm::shifted ? 0.5 : 1.0;
  out << "relative MAE per method (neutral point " << neutral << ")\n";
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    std::vector<double> values;
    for (std::size_t d = 0; d < table.datasets.size(); ++d) {
      if (!std::isnan(rel(m, d))) values.push_back(rel(m, d));
    }
    std::sort(values.begin(), values.end());
    out << "  " << table.methods[m] << ":";
    if (values.empty()) {
      out << " (no complete datasets)\n";
      continue;
    }
    const auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(values.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, values.size() - 1);
      return values[lo] + (pos - lo) * (values[hi] - values[lo]);
    };
    out << " min=" << values.front() << " q1=" << quantile(0.25) << " median=" << quantile(0.5)
        << " q3=" << quantile(0.75) << " max=" << values.back() << "\n";
  }
  return out.str();
}

}  // namespace tsord
