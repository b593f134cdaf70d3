#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsord/feature_matrix.hpp"

namespace tsord {

/// One labeled series: C channels, all of length T.
struct TimeSeriesInstance {
  std::vector<std::vector<double>> channels;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Equal-length series with labels on an ordered scale. The order of
/// class_names defines the scale: index i precedes index j whenever i < j.
/// Labels are 1-based indices into class_names.
struct OrdinalDataset {
  std::string name;
  std::vector<TimeSeriesInstance> instances;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t size() const { return instances.size(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }
  std::size_t num_channels() const { return instances.empty() ? 0 : instances.front().num_channels(); }
  std::size_t length() const { return instances.empty() ? 0 : instances.front().length(); }

  std::vector<long> class_counts() const;

  /// Throws std::invalid_argument when any structural invariant is broken
  /// (ragged channels, labels out of range, non-finite values, ...).
  void validate() const;
};

struct SplitPair {
  OrdinalDataset train;
  OrdinalDataset test;
  int resample_id = 0;
  std::uint64_t seed = 0;
};

/// Parse the `.ts` text format: `@`-prefixed header lines, a `@data` line,
/// then one record per line with `:`-separated channels (comma-separated
/// values) and the class label as the final token.
OrdinalDataset parse_ts(std::istream& in, const std::string& origin = "<stream>");
OrdinalDataset parse_ts(const std::string& text, const std::string& origin = "<string>");
OrdinalDataset load_ts_file(const std::filesystem::path& path);

/// Regression-flavoured `.ts` file (`@targetLabel true`): same record layout
/// but the final token is a real-valued target instead of a class.
struct RegressionDataset {
  std::string name;
  std::vector<TimeSeriesInstance> instances;
  std::vector<double> targets;
};

RegressionDataset parse_ts_regression(std::istream& in, const std::string& origin = "<stream>");
RegressionDataset parse_ts_regression(const std::string& text, const std::string& origin = "<string>");
RegressionDataset load_ts_regression_file(const std::filesystem::path& path);

/// Right-closed interval lookup against ascending thresholds: class q iff
/// value lies in (t[q-2], t[q-1]], with the open ends at the extremes.
int discretize_value(double value, std::span<const double> thresholds);

/// Ordinal dataset from real-valued targets: either fixed thresholds or
/// `bins` equal-width intervals over the pooled target range (the test split
/// shares the train pool so both use one binning).
OrdinalDataset discretize_targets(const RegressionDataset& data, std::span<const double> thresholds);
std::pair<OrdinalDataset, OrdinalDataset> discretize_targets_uniform(const RegressionDataset& train,
                                                                     const RegressionDataset& test,
                                                                     int bins);

/// Write a dataset back in the same `.ts` format; values keep full precision
/// so a reparse reproduces the dataset exactly.
void write_ts(const OrdinalDataset& ds, std::ostream& out);
void write_ts_file(const OrdinalDataset& ds, const std::filesystem::path& path);

/// Stratified re-split of the pooled default partition. resample_id 0 returns
/// the default split unchanged; other ids re-split with each class keeping the
/// default split's per-class training count. The permutation is keyed by
/// (hash of dataset name, resample_id) only, so any process reproduces it.
SplitPair stratified_resample(const OrdinalDataset& default_train, const OrdinalDataset& default_test,
                              int resample_id);

/// N x (C*T) matrix; channel c occupies the contiguous block of T columns
/// starting at (c-1)*T.
FeatureMatrix flatten(const OrdinalDataset& ds);

/// Five-class discretization of a price return with thresholds
/// (-inf, -0.05, -0.02, 0.02, 0.05, inf); intervals are right-closed.
int discretize_returns(double value);

/// Equal-width binning of [min, max] into `bins` classes; the maximum maps to
/// the top bin. Throws on constant input.
std::vector<int> discretize_uniform(const std::vector<double>& values, int bins);

}  // namespace tsord
