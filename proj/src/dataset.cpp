#include "tsord/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tsord/rng.hpp"

namespace tsord {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_value(const std::string& tok, const std::string& origin, std::size_t line_no) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": non-numeric value '" + tok + "'");
  }
  if (!std::isfinite(v)) {
    throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": non-finite value '" + tok + "'");
  }
  return v;
}

bool looks_numeric(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::vector<long> OrdinalDataset::class_counts() const {
  std::vector<long> counts(class_names.size(), 0);
  for (const int y : labels) counts[static_cast<std::size_t>(y - 1)]++;
  return counts;
}

void OrdinalDataset::validate() const {
  if (instances.empty()) throw std::invalid_argument(name + ": dataset has no instances");
  if (instances.size() != labels.size()) {
    throw std::invalid_argument(name + ": instance/label count mismatch");
  }
  if (class_names.size() < 2) throw std::invalid_argument(name + ": fewer than two classes");
  const std::size_t c = instances.front().num_channels();
  const std::size_t t = instances.front().length();
  if (c < 1 || t < 1) throw std::invalid_argument(name + ": empty instance");
  for (const auto& inst : instances) {
    if (inst.num_channels() != c) throw std::invalid_argument(name + ": inconsistent channel count");
    for (const auto& ch : inst.channels) {
      if (ch.size() != t) throw std::invalid_argument(name + ": unequal series lengths");
      for (const double v : ch) {
        if (!std::isfinite(v)) throw std::invalid_argument(name + ": non-finite value");
      }
    }
  }
  const int q = num_classes();
  for (const int y : labels) {
    if (y < 1 || y > q) throw std::invalid_argument(name + ": label out of range");
  }
}

OrdinalDataset parse_ts(std::istream& in, const std::string& origin) {
  OrdinalDataset ds;
  std::vector<std::string> class_tokens;
  bool has_class_label = false;
  bool in_data = false;
  long declared_dims = -1;
  long declared_length = -1;
  std::unordered_map<std::string, int> label_index;

  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_channels = 0;
  std::size_t expected_length = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    if (!in_data && trimmed.front() == '@') {
      std::istringstream hs(trimmed);
      std::string directive;
      hs >> directive;
      directive = lower(directive);
      if (directive == "@data") {
        if (!has_class_label) {
          throw std::invalid_argument(origin + ": @data before a usable @classLabel header");
        }
        in_data = true;
      } else if (directive == "@problemname") {
        hs >> ds.name;
      } else if (directive == "@univariate") {
        std::string v;
        hs >> v;
        if (lower(v) == "true") declared_dims = 1;
      } else if (directive == "@dimensions") {
        hs >> declared_dims;
      } else if (directive == "@serieslength") {
        hs >> declared_length;
      } else if (directive == "@classlabel") {
        std::string flag;
        hs >> flag;
        if (lower(flag) != "true") {
          throw std::invalid_argument(origin + ": @classLabel false - no ordinal labels available");
        }
        std::string tok;
        while (hs >> tok) class_tokens.push_back(tok);
        if (class_tokens.size() < 2) {
          throw std::invalid_argument(origin + ": @classLabel lists fewer than two classes");
        }
        for (std::size_t i = 0; i < class_tokens.size(); ++i) {
          if (!label_index.emplace(class_tokens[i], static_cast<int>(i) + 1).second) {
            throw std::invalid_argument(origin + ": duplicate class label '" + class_tokens[i] + "'");
          }
        }
        // When every label parses as a number, the header order must agree
        // with numeric order, otherwise the ordinal scale is ambiguous.
        bool all_numeric = true;
        std::vector<double> numeric(class_tokens.size());
        for (std::size_t i = 0; i < class_tokens.size(); ++i) {
          if (!looks_numeric(class_tokens[i], numeric[i])) {
            all_numeric = false;
            break;
          }
        }
        if (all_numeric && !std::is_sorted(numeric.begin(), numeric.end())) {
          throw std::invalid_argument(origin + ": numeric class labels not listed in increasing order");
        }
        has_class_label = true;
      }
      // unknown directives (@timeStamps, @equalLength, @missing, ...) are ignored
      continue;
    }

    if (!in_data) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": record before @data");
    }

    const std::vector<std::string> parts = split(trimmed, ':');
    if (parts.size() < 2) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": record without class label");
    }
    const std::string label_tok = strip(parts.back());
    const auto it = label_index.find(label_tok);
    if (it == label_index.end()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": unknown label token '" +
                                  label_tok + "'");
    }

    TimeSeriesInstance inst;
    inst.channels.reserve(parts.size() - 1);
    for (std::size_t c = 0; c + 1 < parts.size(); ++c) {
      std::vector<double> channel;
      for (const std::string& tok : split(parts[c], ',')) {
        const std::string t = strip(tok);
        if (t == "?" || t.empty()) {
          throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": missing value");
        }
        channel.push_back(parse_value(t, origin, line_no));
      }
      inst.channels.push_back(std::move(channel));
    }

    if (ds.instances.empty()) {
      expected_channels = inst.num_channels();
      expected_length = inst.length();
      if (declared_dims > 0 && static_cast<long>(expected_channels) != declared_dims) {
        throw std::invalid_argument(origin + ": record has " + std::to_string(expected_channels) +
                                    " channels, header declares " + std::to_string(declared_dims));
      }
      if (declared_length > 0 && static_cast<long>(expected_length) != declared_length) {
        throw std::invalid_argument(origin + ": record length " + std::to_string(expected_length) +
                                    " does not match @seriesLength " + std::to_string(declared_length));
      }
    } else if (inst.num_channels() != expected_channels) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": inconsistent channel count");
    }
    for (const auto& ch : inst.channels) {
      if (ch.size() != expected_length) {
        throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": unequal series lengths");
      }
    }

    ds.instances.push_back(std::move(inst));
    ds.labels.push_back(it->second);
  }

  if (!in_data) throw std::invalid_argument(origin + ": no @data section");
  ds.class_names = std::move(class_tokens);
  ds.validate();
  return ds;
}

OrdinalDataset parse_ts(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  return parse_ts(in, origin);
}

OrdinalDataset load_ts_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return parse_ts(in, path.string());
}

void write_ts(const OrdinalDataset& ds, std::ostream& out) {
  out << "@problemName " << ds.name << "\n";
  out << "@timeStamps false\n";
  out << "@missing false\n";
  out << "@univariate " << (ds.num_channels() == 1 ? "true" : "false") << "\n";
  out << "@dimensions " << ds.num_channels() << "\n";
  out << "@equalLength true\n";
  out << "@seriesLength " << ds.length() << "\n";
  out << "@classLabel true";
  for (const auto& c : ds.class_names) out << ' ' << c;
  out << "\n@data\n";
  char buf[40];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (const auto& ch : ds.instances[i].channels) {
      for (std::size_t t = 0; t < ch.size(); ++t) {
        if (t) out << ',';
        std::snprintf(buf, sizeof buf, "%.17g", ch[t]);
        out << buf;
      }
      out << ':';
    }
    out << ds.class_names[static_cast<std::size_t>(ds.labels[i] - 1)] << "\n";
  }
}

void write_ts_file(const OrdinalDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string() + " for writing");
  write_ts(ds, out);
}

SplitPair stratified_resample(const OrdinalDataset& default_train, const OrdinalDataset& default_test,
                              int resample_id) {
  if (resample_id < 0) throw std::invalid_argument("resample_id must be >= 0");
  if (default_train.class_names != default_test.class_names) {
    throw std::invalid_argument("train/test class name mismatch");
  }
  if (resample_id == 0) return {default_train, default_test, 0, hash64(default_train.name)};

  const int q = default_train.num_classes();
  const std::vector<long> train_counts = default_train.class_counts();

  // Pool in canonical order: all default-train instances, then default-test.
  std::vector<const TimeSeriesInstance*> pool;
  std::vector<int> pool_labels;
  pool.reserve(default_train.size() + default_test.size());
  for (std::size_t i = 0; i < default_train.size(); ++i) {
    pool.push_back(&default_train.instances[i]);
    pool_labels.push_back(default_train.labels[i]);
  }
  for (std::size_t i = 0; i < default_test.size(); ++i) {
    pool.push_back(&default_test.instances[i]);
    pool_labels.push_back(default_test.labels[i]);
  }

  std::vector<char> to_train(pool.size(), 0);
  for (int c = 1; c <= q; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool_labels[i] == c) members.push_back(i);
    }
    if (members.empty()) {
      throw std::invalid_argument(default_train.name + ": class " +
                                  default_train.class_names[static_cast<std::size_t>(c - 1)] +
                                  " absent from pooled data");
    }
    const long want = train_counts[static_cast<std::size_t>(c - 1)];
    if (want > static_cast<long>(members.size())) {
      throw std::invalid_argument(default_train.name + ": not enough pooled members of class " +
                                  std::to_string(c));
    }
    Rng rng(hash64(default_train.name), static_cast<std::uint64_t>(resample_id),
            static_cast<std::uint64_t>(c));
    rng.shuffle(members);
    for (long i = 0; i < want; ++i) to_train[members[static_cast<std::size_t>(i)]] = 1;
  }

  SplitPair out;
  out.resample_id = resample_id;
  out.seed = hash64(default_train.name);
  out.train.name = default_train.name;
  out.train.class_names = default_train.class_names;
  out.test.name = default_test.name;
  out.test.class_names = default_test.class_names;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    OrdinalDataset& dst = to_train[i] ? out.train : out.test;
    dst.instances.push_back(*pool[i]);
    dst.labels.push_back(pool_labels[i]);
  }
  return out;
}

FeatureMatrix flatten(const OrdinalDataset& ds) {
  const std::size_t c = ds.num_channels();
  const std::size_t t = ds.length();
  FeatureMatrix fm;
  fm.values = Matrix(ds.size(), c * t);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double* row = fm.values.row(i).data();
    for (std::size_t ch = 0; ch < c; ++ch) {
      const auto& src = ds.instances[i].channels[ch];
      std::copy(src.begin(), src.end(), row + ch * t);
    }
  }
  fm.columns.resize(c * t);
  return fm;
}

int discretize_value(double value, std::span<const double> thresholds) {
  if (!std::isfinite(value)) throw std::invalid_argument("discretize_value: non-finite value");
  for (std::size_t q = 0; q < thresholds.size(); ++q) {
    if (value <= thresholds[q]) return static_cast<int>(q) + 1;
  }
  return static_cast<int>(thresholds.size()) + 1;
}

int discretize_returns(double value) {
  static const double thresholds[4] = {-0.05, -0.02, 0.02, 0.05};
  return discretize_value(value, thresholds);
}

RegressionDataset parse_ts_regression(std::istream& in, const std::string& origin) {
  RegressionDataset ds;
  bool has_target = false;
  bool in_data = false;
  long declared_dims = -1;
  long declared_length = -1;

  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_channels = 0;
  std::size_t expected_length = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    if (!in_data && trimmed.front() == '@') {
      std::istringstream hs(trimmed);
      std::string directive;
      hs >> directive;
      directive = lower(directive);
      if (directive == "@data") {
        if (!has_target) {
          throw std::invalid_argument(origin + ": @data before @targetLabel true");
        }
        in_data = true;
      } else if (directive == "@problemname") {
        hs >> ds.name;
      } else if (directive == "@univariate") {
        std::string v;
        hs >> v;
        if (lower(v) == "true") declared_dims = 1;
      } else if (directive == "@dimensions") {
        hs >> declared_dims;
      } else if (directive == "@serieslength") {
        hs >> declared_length;
      } else if (directive == "@targetlabel") {
        std::string flag;
        hs >> flag;
        if (lower(flag) != "true") {
          throw std::invalid_argument(origin + ": @targetLabel false - no targets available");
        }
        has_target = true;
      } else if (directive == "@classlabel") {
        std::string flag;
        hs >> flag;
        if (lower(flag) == "true") {
          throw std::invalid_argument(origin + ": class-labelled file; use parse_ts");
        }
      }
      continue;
    }

    if (!in_data) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": record before @data");
    }

    const std::vector<std::string> parts = split(trimmed, ':');
    if (parts.size() < 2) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": record without target");
    }
    const double target = parse_value(strip(parts.back()), origin, line_no);

    TimeSeriesInstance inst;
    inst.channels.reserve(parts.size() - 1);
    for (std::size_t c = 0; c + 1 < parts.size(); ++c) {
      std::vector<double> channel;
      for (const std::string& tok : split(parts[c], ',')) {
        const std::string t = strip(tok);
        if (t == "?" || t.empty()) {
          throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": missing value");
        }
        channel.push_back(parse_value(t, origin, line_no));
      }
      inst.channels.push_back(std::move(channel));
    }

    if (ds.instances.empty()) {
      expected_channels = inst.num_channels();
      expected_length = inst.length();
      if (declared_dims > 0 && static_cast<long>(expected_channels) != declared_dims) {
        throw std::invalid_argument(origin + ": channel count does not match the header");
      }
      if (declared_length > 0 && static_cast<long>(expected_length) != declared_length) {
        throw std::invalid_argument(origin + ": record length does not match @seriesLength");
      }
    } else if (inst.num_channels() != expected_channels) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": inconsistent channel count");
    }
    for (const auto& ch : inst.channels) {
      if (ch.size() != expected_length) {
        throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": unequal series lengths");
      }
    }

    ds.instances.push_back(std::move(inst));
    ds.targets.push_back(target);
  }
  if (!in_data) throw std::invalid_argument(origin + ": no @data section");
  if (ds.instances.empty()) throw std::invalid_argument(origin + ": no records");
  return ds;
}

RegressionDataset parse_ts_regression(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  return parse_ts_regression(in, origin);
}

RegressionDataset load_ts_regression_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return parse_ts_regression(in, path.string());
}

OrdinalDataset discretize_targets(const RegressionDataset& data, std::span<const double> thresholds) {
  if (data.instances.size() != data.targets.size()) {
    throw std::invalid_argument("discretize_targets: instance/target count mismatch");
  }
  if (thresholds.empty()) throw std::invalid_argument("discretize_targets: no thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("discretize_targets: thresholds must ascend");
  }
  OrdinalDataset out;
  out.name = data.name;
  out.instances = data.instances;
  for (std::size_t q = 0; q <= thresholds.size(); ++q) out.class_names.push_back(std::to_string(q + 1));
  for (const double t : data.targets) out.labels.push_back(discretize_value(t, thresholds));
  out.validate();
  return out;
}

std::pair<OrdinalDataset, OrdinalDataset> discretize_targets_uniform(const RegressionDataset& train,
                                                                     const RegressionDataset& test,
                                                                     int bins) {
  if (train.instances.size() != train.targets.size() || test.instances.size() != test.targets.size()) {
    throw std::invalid_argument("discretize_targets_uniform: instance/target count mismatch");
  }
  std::vector<double> pooled(train.targets);
  pooled.insert(pooled.end(), test.targets.begin(), test.targets.end());
  const std::vector<int> labels = discretize_uniform(pooled, bins);

  auto build = [bins](const RegressionDataset& src, const int* label_ptr) {
    OrdinalDataset out;
    out.name = src.name;
    out.instances = src.instances;
    for (int q = 1; q <= bins; ++q) out.class_names.push_back(std::to_string(q));
    out.labels.assign(label_ptr, label_ptr + src.targets.size());
    out.validate();
    return out;
  };
  return {build(train, labels.data()), build(test, labels.data() + train.targets.size())};
}

std::vector<int> discretize_uniform(const std::vector<double>& values, int bins) {
  if (bins < 2) throw std::invalid_argument("discretize_uniform: bins must be >= 2");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (values.empty() || *mn == *mx) {
    throw std::invalid_argument("discretize_uniform: constant input sequence");
  }
  const double width = (*mx - *mn) / bins;
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int b = static_cast<int>(std::floor((values[i] - *mn) / width)) + 1;
    b = std::clamp(b, 1, bins);
    out[i] = b;
  }
  return out;
}

}  // namespace tsord
