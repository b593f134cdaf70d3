#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsord/metrics.hpp"
#include "tsord/stats.hpp"

namespace tsord {

/// One benchmarked pipeline: a feature step ("rocket", "minirocket",
/// "multirocket" or "flatten") feeding a classifier ("logistic_at" or
/// "multinomial"). lambda < 0 selects it by cross-validation.
struct MethodSpec {
  std::string name;
  std::string transform = "minirocket";
  std::string classifier = "logistic_at";
  double lambda = -1.0;
  int num_kernels = 10000;
  int num_features = 0;  // 0: variant default
};

struct DatasetSpec {
  std::string name;
  std::string train_path;
  std::string test_path;
  // When set, the paths are regression-style files (@targetLabel) whose
  // targets are discretized at load time: fixed right-closed thresholds, or
  // equal-width bins over the pooled target range.
  std::vector<double> discretize_thresholds;
  int discretize_bins = 0;
};

struct RunManifest {
  std::vector<DatasetSpec> datasets;
  std::vector<MethodSpec> methods;
  int resamples = 30;
  std::vector<Metric> metrics = {Metric::ccr, Metric::mae, Metric::qwk, Metric::one_off};
  std::string output_dir = "results";
  std::uint64_t seed = 0;

  void validate() const;  // throws on duplicate method names etc.
};

RunManifest load_manifest(const std::filesystem::path& path);

struct ResultRecord {
  std::string method;
  std::string dataset;
  int resample = 0;
  Metric metric = Metric::mae;
  double value = 0.0;
  double fit_ms = 0.0;
  double predict_ms = 0.0;
};

struct CellFailure {
  std::string method;
  std::string dataset;
  int resample = 0;
  std::string reason;
};

struct ResultsTable {
  std::vector<ResultRecord> records;
  std::vector<CellFailure> failures;

  const ResultRecord* find(const std::string& method, const std::string& dataset, int resample,
                           Metric metric) const;
  std::vector<std::string> method_names() const;
  std::vector<std::string> dataset_names() const;

  /// Canonical order: method, dataset, resample, metric.
  void sort();
};

struct RunOptions {
  int workers = 0;           // 0: TSORD_WORKERS env var, then the OpenMP default
  std::ostream* log = nullptr;
};

/// The full protocol: for every (dataset, resample, method) cell, build the
/// stratified split, run the feature step, pick lambda by cross-validation
/// when requested, fit, predict, and score every metric, with wall time per
/// fit and predict phase. Records append to <output_dir>/results.csv as cells
/// finish, so an interrupted run resumes where it stopped; on completion the
/// file is rewritten in canonical order. Cell errors become failure records
/// (written to errors.json) and the run continues.
ResultsTable run_experiment(const RunManifest& manifest, const RunOptions& options = {});

ResultsTable load_results_csv(const std::filesystem::path& path);
/// Merge every *.csv in a directory (sorted by name, first record per key
/// wins) so externally produced baselines can join the statistics.
ResultsTable load_results_dir(const std::filesystem::path& dir);
void write_results_csv(const ResultsTable& table, const std::filesystem::path& path);

/// Method-by-dataset table of per-dataset means over resamples.
ScoreTable per_dataset_means(const ResultsTable& table, Metric metric);
/// Method-by-(dataset, resample) table for the finer pairing option.
ScoreTable per_cell_values(const ResultsTable& table, Metric metric);

struct StatsOptions {
  Metric metric = Metric::mae;
  double alpha = 0.05;
  RelMaeForm relmae_form = RelMaeForm::shifted;
  bool pair_by_cell = false;  // pair signed-rank tests per (dataset, resample) instead of per dataset
};

/// Text renderings of the comparison reports (the JSON documents are emitted
/// by the CLI next to them).
std::string render_pairwise(const ScoreTable& table, bool lower_is_better, double alpha);
std::string render_cdd(const ScoreTable& table, bool lower_is_better, double alpha);
std::string render_mcm(const ScoreTable& table, bool lower_is_better);
std::string render_relmae(const ScoreTable& table, RelMaeForm form);

}  // namespace tsord
