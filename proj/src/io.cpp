#include "tsord/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tsord/rng.hpp"

namespace tsord {

using nlohmann::json;

void write_features_csv(const FeatureMatrix& features, const std::vector<int>& labels,
                        const std::filesystem::path& path) {
  if (!labels.empty() && labels.size() != features.rows()) {
    throw std::invalid_argument("write_features_csv: label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "label";
  for (std::size_t j = 0; j < features.cols(); ++j) out << ",f" << j;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out << (labels.empty() ? 0 : labels[i]);
    const double* row = features.values.row(i).data();
    for (std::size_t j = 0; j < features.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      out << ',' << buf;
    }
    out << "\n";
  }
}

std::pair<FeatureMatrix, std::vector<int>> read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    bool first = true;
    while (p <= end) {
      const char* stop = p;
      while (stop < end && *stop != ',') ++stop;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(p, stop, v);
      if (ec != std::errc() || ptr != stop) {
        throw std::runtime_error(path.string() + ": bad numeric field");
      }
      if (first) {
        labels.push_back(static_cast<int>(v));
        first = false;
      } else {
        row.push_back(v);
      }
      if (stop == end) break;
      p = stop + 1;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");

  FeatureMatrix fm;
  fm.values = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != fm.values.cols) throw std::runtime_error(path.string() + ": ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), fm.values.row(i).begin());
  }
  fm.columns.resize(fm.values.cols);
  return {std::move(fm), std::move(labels)};
}

namespace {

json column_meta_json(const FeatureMatrix& features) {
  json cols = json::array();
  for (const ColumnMeta& m : features.columns) {
    cols.push_back({{"op", m.op},
                    {"kernel", m.kernel},
                    {"dilation", m.dilation},
                    {"padded", m.padded},
                    {"representation", m.representation},
                    {"bias", m.bias}});
  }
  return cols;
}

}  // namespace

void write_column_meta(const FeatureMatrix& features, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << json{{"columns", column_meta_json(features)}}.dump(2) << "\n";
}

std::vector<ColumnMeta> read_column_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc = json::parse(in);
  std::vector<ColumnMeta> out;
  for (const json& c : doc.at("columns")) {
    ColumnMeta m;
    m.op = c.at("op").get<std::string>();
    m.kernel = c.at("kernel").get<int>();
    m.dilation = c.at("dilation").get<int>();
    m.padded = c.at("padded").get<bool>();
    m.representation = c.at("representation").get<int>();
    m.bias = c.at("bias").get<double>();
    out.push_back(std::move(m));
  }
  return out;
}

std::string feature_provenance_hash(const FeatureMatrix& features) {
  const std::string text = column_meta_json(features).dump();
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash64(text)));
  return buf;
}

namespace {

json scaler_json(const Scaler& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

Scaler scaler_from(const json& j) {
  Scaler s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  return s;
}

void dump_to(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace

void save_model(const LogisticATModel& model, const std::filesystem::path& path) {
  dump_to(json{{"type", "logistic_at"},
               {"weights", model.weights},
               {"thresholds", model.thresholds},
               {"lambda", model.lambda},
               {"scaler", scaler_json(model.scaler)},
               {"num_classes", model.num_classes},
               {"seed", model.seed},
               {"feature_hash", model.feature_hash}},
          path);
}

void save_model(const MultinomialModel& model, const std::filesystem::path& path) {
  dump_to(json{{"type", "multinomial"},
               {"weights", model.weights.data},
               {"intercepts", model.intercepts},
               {"rows", model.weights.rows},
               {"cols", model.weights.cols},
               {"lambda", model.lambda},
               {"scaler", scaler_json(model.scaler)},
               {"num_classes", model.num_classes},
               {"seed", model.seed},
               {"feature_hash", model.feature_hash}},
          path);
}

void save_head(const CLMHead& head, const HeadConfig& config,
               const std::vector<double>& loss_trajectory, const std::filesystem::path& path) {
  dump_to(json{{"type", "clm_head"},
               {"theta1", head.theta1},
               {"alphas", head.alphas},
               {"input_dim", head.input_dim},
               {"hidden_width", head.hidden_width},
               {"w1", head.w1},
               {"b1", head.b1},
               {"w2", head.w2},
               {"b2", head.b2},
               {"config",
                {{"hidden_width", config.hidden_width},
                 {"learning_rate", config.learning_rate},
                 {"epochs", config.epochs},
                 {"seed", config.seed},
                 {"loss", config.loss == HeadLoss::qwk ? "qwk" : "cross_entropy"}}},
               {"loss_trajectory", loss_trajectory}},
          path);
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc = json::parse(in);
  const std::string type = doc.at("type").get<std::string>();

  LoadedModel out;
  if (type == "logistic_at") {
    out.type = ModelType::logistic_at;
    LogisticATModel& m = out.logistic_at;
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.thresholds = doc.at("thresholds").get<std::vector<double>>();
    m.lambda = doc.at("lambda").get<double>();
    m.scaler = scaler_from(doc.at("scaler"));
    m.num_classes = doc.at("num_classes").get<int>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.feature_hash = doc.at("feature_hash").get<std::string>();
  } else if (type == "multinomial") {
    out.type = ModelType::multinomial;
    MultinomialModel& m = out.multinomial;
    m.weights = Matrix(doc.at("rows").get<std::size_t>(), doc.at("cols").get<std::size_t>());
    m.weights.data = doc.at("weights").get<std::vector<double>>();
    m.intercepts = doc.at("intercepts").get<std::vector<double>>();
    m.lambda = doc.at("lambda").get<double>();
    m.scaler = scaler_from(doc.at("scaler"));
    m.num_classes = doc.at("num_classes").get<int>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.feature_hash = doc.at("feature_hash").get<std::string>();
  } else {
    throw std::runtime_error(path.string() + ": unknown model type '" + type + "'");
  }
  return out;
}

std::vector<int> LoadedModel::predict(const Matrix& features) const {
  return type == ModelType::logistic_at ? logistic_at.predict(features)
                                        : multinomial.predict(features);
}

CLMHead load_head(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json doc = json::parse(in);
  if (doc.at("type").get<std::string>() != "clm_head") {
    throw std::runtime_error(path.string() + ": not a clm_head file");
  }
  CLMHead head;
  head.theta1 = doc.at("theta1").get<double>();
  head.alphas = doc.at("alphas").get<std::vector<double>>();
  head.input_dim = doc.at("input_dim").get<int>();
  head.hidden_width = doc.at("hidden_width").get<int>();
  head.w1 = doc.at("w1").get<std::vector<double>>();
  head.b1 = doc.at("b1").get<std::vector<double>>();
  head.w2 = doc.at("w2").get<std::vector<double>>();
  head.b2 = doc.at("b2").get<double>();
  return head;
}

}  // namespace tsord
