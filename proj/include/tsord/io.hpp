#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "tsord/clm_head.hpp"
#include "tsord/feature_matrix.hpp"
#include "tsord/logistic_at.hpp"
#include "tsord/multinomial.hpp"

namespace tsord {

/// Feature CSV: header `label,f0,f1,...`, one instance per row, full-precision
/// values. Labels may be all zero for unlabeled data.
void write_features_csv(const FeatureMatrix& features, const std::vector<int>& labels,
                        const std::filesystem::path& path);
std::pair<FeatureMatrix, std::vector<int>> read_features_csv(const std::filesystem::path& path);

/// Column provenance sidecar (ops, kernels, dilations, representations,
/// biases) as JSON.
void write_column_meta(const FeatureMatrix& features, const std::filesystem::path& path);
std::vector<ColumnMeta> read_column_meta(const std::filesystem::path& path);

/// Order-independent content hash of the column provenance, recorded in
/// fitted models so a model file can be matched to its feature layout.
std::string feature_provenance_hash(const FeatureMatrix& features);

// Model files are JSON documents with a "type" tag.
void save_model(const LogisticATModel& model, const std::filesystem::path& path);
void save_model(const MultinomialModel& model, const std::filesystem::path& path);
void save_head(const CLMHead& head, const HeadConfig& config,
               const std::vector<double>& loss_trajectory, const std::filesystem::path& path);

enum class ModelType { logistic_at, multinomial };

struct LoadedModel {
  ModelType type = ModelType::logistic_at;
  LogisticATModel logistic_at;
  MultinomialModel multinomial;

  std::vector<int> predict(const Matrix& features) const;
};

LoadedModel load_model(const std::filesystem::path& path);
CLMHead load_head(const std::filesystem::path& path);

}  // namespace tsord
