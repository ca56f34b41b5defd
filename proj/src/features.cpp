#include "seisvm/features.hpp"

#include <algorithm>
#include <cmath>

#include "seisvm/error.hpp"
#include "seisvm/io_util.hpp"

namespace seisvm {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back(line.substr(b, i - b));
  }
  return out;
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    fn(std::string_view(text).substr(pos, nl - pos), line_no);
    pos = nl + 1;
  }
}

}  // namespace

FeatureMatrix::FeatureMatrix(Matrix patterns, std::optional<std::vector<int>> labels,
                             std::optional<std::vector<double>> times)
    : patterns_(std::move(patterns)), labels_(std::move(labels)), times_(std::move(times)) {
  for (double v : patterns_.data()) {
    if (!std::isfinite(v)) throw ValidationError("feature matrix holds a non-finite value");
  }
  if (labels_) {
    if (labels_->size() != patterns_.rows()) {
      throw ValidationError("label count " + std::to_string(labels_->size()) +
                            " does not match pattern count " + std::to_string(patterns_.rows()));
    }
    for (int y : *labels_) {
      if (y != kNoiseLabel && y != kCleanLabel) {
        throw ValidationError("label " + std::to_string(y) + " is not +1 or -1");
      }
    }
  }
  if (times_ && times_->size() != patterns_.rows()) {
    throw ValidationError("time count does not match pattern count");
  }
}

const std::vector<int>& FeatureMatrix::labels() const {
  if (!labels_) throw ValidationError("feature matrix is unlabelled");
  return *labels_;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
  Matrix m(indices.size(), n_features());
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<double>> times;
  if (labels_) labels.emplace().reserve(indices.size());
  if (times_) times.emplace().reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = pattern(indices[r]);
    std::copy(src.begin(), src.end(), m.row(r).begin());
    if (labels_) labels->push_back((*labels_)[indices[r]]);
    if (times_) times->push_back((*times_)[indices[r]]);
  }
  return FeatureMatrix(std::move(m), std::move(labels), std::move(times));
}

void BandSelect::validate(std::size_t n_rows) const {
  if (row_start < 1 || row_start > row_end || row_end > n_rows) {
    throw ValidationError("band " + std::to_string(row_start) + ".." + std::to_string(row_end) +
                          " outside 1.." + std::to_string(n_rows));
  }
}

FeatureMatrix extract_band_patterns(const Spectrogram& spec, const BandSelect& band) {
  band.validate(spec.rows());
  Matrix m(spec.cols(), band.width());
  for (std::size_t j = 0; j < spec.cols(); ++j) {
    const auto col = spec.column(j).subspan(band.row_start - 1, band.width());
    std::copy(col.begin(), col.end(), m.row(j).begin());
  }
  return FeatureMatrix(std::move(m), std::nullopt, spec.times());
}

FeatureMatrix normalize_unit_sum(const FeatureMatrix& fm) {
  Matrix m = fm.patterns();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    double sum = 0.0;
    for (double v : row) sum += v;
    if (!(sum > 0.0)) {
      throw ValidationError("pattern " + std::to_string(i) +
                            " has non-positive sum; cannot normalize");
    }
    for (double& v : row) v /= sum;
  }
  return FeatureMatrix(std::move(m), fm.maybe_labels(), fm.times());
}

FeatureMatrix stack_labeled(const FeatureMatrix& pos, const FeatureMatrix& neg) {
  const bool pos_empty = pos.n_patterns() == 0;
  const bool neg_empty = neg.n_patterns() == 0;
  if (!pos_empty && !neg_empty && pos.n_features() != neg.n_features()) {
    throw ValidationError("cannot stack " + std::to_string(pos.n_features()) + "-feature and " +
                          std::to_string(neg.n_features()) + "-feature patterns");
  }
  const std::size_t width = pos_empty ? neg.n_features() : pos.n_features();
  Matrix m(pos.n_patterns() + neg.n_patterns(), width);
  std::vector<int> labels;
  labels.reserve(m.rows());
  std::size_t r = 0;
  for (std::size_t i = 0; i < pos.n_patterns(); ++i, ++r) {
    std::ranges::copy(pos.pattern(i), m.row(r).begin());
    labels.push_back(kNoiseLabel);
  }
  for (std::size_t i = 0; i < neg.n_patterns(); ++i, ++r) {
    std::ranges::copy(neg.pattern(i), m.row(r).begin());
    labels.push_back(kCleanLabel);
  }
  return FeatureMatrix(std::move(m), std::move(labels));
}

ScaleRange fit_scale(const FeatureMatrix& fm, double lower, double upper) {
  if (!(lower < upper)) {
    throw ValidationError("scale bounds need lower < upper");
  }
  if (fm.n_patterns() == 0) {
    throw ValidationError("cannot fit scaling on an empty matrix");
  }
  ScaleRange range{lower, upper, {}};
  range.features.resize(fm.n_features());
  for (std::size_t f = 0; f < fm.n_features(); ++f) {
    range.features[f] = {fm.patterns()(0, f), fm.patterns()(0, f)};
  }
  for (std::size_t i = 1; i < fm.n_patterns(); ++i) {
    const auto p = fm.pattern(i);
    for (std::size_t f = 0; f < p.size(); ++f) {
      range.features[f].min = std::min(range.features[f].min, p[f]);
      range.features[f].max = std::max(range.features[f].max, p[f]);
    }
  }
  return range;
}

void apply_scale_inplace(std::span<double> pattern, const ScaleRange& range) {
  if (pattern.size() != range.features.size()) {
    throw ValidationError("pattern has " + std::to_string(pattern.size()) +
                          " features but range file covers " +
                          std::to_string(range.features.size()));
  }
  const double span = range.upper - range.lower;
  for (std::size_t f = 0; f < pattern.size(); ++f) {
    const FeatureRange& r = range.features[f];
    pattern[f] = r.is_constant() ? 0.0 : range.lower + span * (pattern[f] - r.min) / (r.max - r.min);
  }
}

FeatureMatrix apply_scale(const FeatureMatrix& fm, const ScaleRange& range) {
  if (fm.n_features() != range.features.size() && fm.n_patterns() > 0) {
    throw ValidationError("matrix has " + std::to_string(fm.n_features()) +
                          " features but range covers " + std::to_string(range.features.size()));
  }
  Matrix m = fm.patterns();
  for (std::size_t i = 0; i < m.rows(); ++i) apply_scale_inplace(m.row(i), range);
  return FeatureMatrix(std::move(m), fm.maybe_labels(), fm.times());
}

void write_sparse(const FeatureMatrix& fm, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t i = 0; i < fm.n_patterns(); ++i) {
    if (fm.has_labels()) {
      out += fm.labels()[i] > 0 ? "+1" : "-1";
    } else {
      out += "0";
    }
    const auto p = fm.pattern(i);
    for (std::size_t f = 0; f < p.size(); ++f) {
      if (p[f] == 0.0) continue;
      out += ' ';
      out += std::to_string(f + 1);
      out += ':';
      out += io::format_real(p[f]);
    }
    out += '\n';
  }
  io::write_text(path, out);
}

FeatureMatrix read_sparse(const std::filesystem::path& path,
                          std::optional<std::size_t> n_features) {
  const std::string text = io::read_text(path);
  struct Entry {
    std::size_t index;
    double value;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<int> labels;
  std::size_t max_index = 0;
  std::size_t n_zero_labels = 0;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    const auto tokens = split_ws(line);
    if (tokens.empty()) return;
    try {
      const double label = io::parse_real(tokens[0], "label");
      if (label == 0.0) {
        ++n_zero_labels;
        labels.push_back(0);
      } else if (label == 1.0 || label == -1.0) {
        labels.push_back(static_cast<int>(label));
      } else {
        throw ValidationError("label '" + std::string(tokens[0]) + "' is not +1, -1 or 0");
      }
      std::vector<Entry> row;
      row.reserve(tokens.size() - 1);
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        const auto colon = tokens[t].find(':');
        if (colon == std::string_view::npos) {
          throw ValidationError("token '" + std::string(tokens[t]) + "' is not <index>:<value>");
        }
        const long long idx = io::parse_integer(tokens[t].substr(0, colon), "feature index");
        if (idx < 1) throw ValidationError("feature index must be >= 1");
        const auto index = static_cast<std::size_t>(idx);
        if (!row.empty() && index <= row.back().index) {
          throw ValidationError("indices not ascending at '" + std::string(tokens[t]) + "'");
        }
        if (n_features && index > *n_features) {
          throw ValidationError("feature index " + std::to_string(index) + " exceeds " +
                                std::to_string(*n_features));
        }
        const double value = io::parse_real(tokens[t].substr(colon + 1), "feature value");
        if (!std::isfinite(value)) throw ValidationError("non-finite feature value");
        row.push_back({index, value});
        max_index = std::max(max_index, index);
      }
      rows.push_back(std::move(row));
    } catch (const ValidationError& e) {
      throw ValidationError(where() + e.what());
    }
  });

  if (n_zero_labels != 0 && n_zero_labels != labels.size()) {
    throw ValidationError(path.string() + ": mixes unlabelled (0) and labelled patterns");
  }
  const std::size_t width = n_features.value_or(max_index);
  Matrix m(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const Entry& e : rows[i]) m(i, e.index - 1) = e.value;
  }
  if (n_zero_labels == labels.size() && !labels.empty()) {
    return FeatureMatrix(std::move(m));
  }
  return FeatureMatrix(std::move(m), std::move(labels));
}

void write_range(const ScaleRange& range, const std::filesystem::path& path) {
  std::string out = "x\n";
  out += io::format_real(range.lower) + " " + io::format_real(range.upper) + "\n";
  for (std::size_t f = 0; f < range.features.size(); ++f) {
    out += std::to_string(f + 1) + " " + io::format_real(range.features[f].min) + " " +
           io::format_real(range.features[f].max) + "\n";
  }
  io::write_text(path, out);
}

ScaleRange read_range(const std::filesystem::path& path, std::optional<std::size_t> n_features) {
  const std::string text = io::read_text(path);
  ScaleRange range;
  std::vector<std::pair<std::size_t, FeatureRange>> entries;
  int stage = 0;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty()) return;
    try {
      if (stage == 0) {
        if (tokens.size() != 1 || tokens[0] != "x") {
          throw ValidationError("range file must start with a line 'x'");
        }
        stage = 1;
      } else if (stage == 1) {
        if (tokens.size() != 2) throw ValidationError("expected '<lower> <upper>'");
        range.lower = io::parse_real(tokens[0], "lower bound");
        range.upper = io::parse_real(tokens[1], "upper bound");
        if (!(range.lower < range.upper)) throw ValidationError("lower bound must be < upper");
        stage = 2;
      } else {
        if (tokens.size() != 3) throw ValidationError("expected '<index> <min> <max>'");
        const long long idx = io::parse_integer(tokens[0], "feature index");
        if (idx < 1) throw ValidationError("feature index must be >= 1");
        FeatureRange fr{io::parse_real(tokens[1], "feature min"),
                        io::parse_real(tokens[2], "feature max")};
        if (!(fr.min <= fr.max)) throw ValidationError("feature min exceeds max");
        const auto index = static_cast<std::size_t>(idx);
        if (!entries.empty() && index <= entries.back().first) {
          throw ValidationError("indices not ascending");
        }
        entries.emplace_back(index, fr);
      }
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
  if (stage < 2) throw ValidationError(path.string() + ": truncated range file");
  const std::size_t width =
      n_features.value_or(entries.empty() ? 0 : entries.back().first);
  range.features.assign(width, FeatureRange{});
  for (const auto& [index, fr] : entries) {
    if (index > width) {
      throw ValidationError(path.string() + ": feature index " + std::to_string(index) +
                            " exceeds " + std::to_string(width));
    }
    range.features[index - 1] = fr;
  }
  return range;
}

}  // namespace seisvm
