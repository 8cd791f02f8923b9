#include "npsr/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "npsr/error.hpp"

namespace npsr {

LabeledSeries::LabeledSeries(Matrix values, std::optional<Labels> labels,
                             std::vector<std::string> channel_names, std::size_t time_origin)
    : values_(std::move(values)),
      labels_(std::move(labels)),
      channel_names_(std::move(channel_names)),
      time_origin_(time_origin) {
  if (values_.rows() == 0) throw EmptyInput("series has no rows");
  if (values_.cols() == 0) throw ShapeError("series has no channels");
  if (labels_) {
    if (labels_->size() != values_.rows()) {
      throw LabelError("label count " + std::to_string(labels_->size()) + " does not match length " +
                       std::to_string(values_.rows()));
    }
    for (int y : *labels_) {
      if (y != 0 && y != 1) throw LabelError("labels must be 0 or 1, got " + std::to_string(y));
    }
  }
  if (!channel_names_.empty() && channel_names_.size() != values_.cols()) {
    throw ShapeError("channel name count does not match channel count");
  }
}

const Labels& LabeledSeries::require_labels() const {
  if (!labels_) throw LabelError("series has no labels");
  return *labels_;
}

std::string to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::anomaly:
      return "anomaly";
    case ScoreKind::nominality:
      return "nominality";
    case ScoreKind::induced:
      return "induced";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(std::string_view cell) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

bool is_index(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

}  // namespace

LabeledSeries parse_csv(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<std::string> header;
  std::optional<std::size_t> label_index;

  if (options.has_header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw EmptyInput("no header row");
    for (auto cell : split_commas(line)) header.emplace_back(cell);
    width = header.size();
  }

  if (options.label_column) {
    const std::string& want = *options.label_column;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == want) label_index = i;
    }
    if (!label_index) {
      if (!is_index(want)) throw ConfigError("label column '" + want + "' not found in header");
      label_index = static_cast<std::size_t>(std::stoul(want));
    }
  }

  std::vector<double> values;
  Labels labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
    }
    if (label_index && *label_index >= width) throw ConfigError("label column index out of range");
    for (std::size_t c = 0; c < width; ++c) {
      const auto parsed = parse_real(cells[c]);
      if (label_index && c == *label_index) {
        if (!parsed || !(*parsed == 0.0 || *parsed == 1.0)) {
          throw LabelError("row " + std::to_string(line_no) + ": label '" + std::string(cells[c]) + "' is not 0 or 1");
        }
        labels.push_back(static_cast<int>(*parsed));
        continue;
      }
      if (!parsed) throw ParseError(line_no, "cannot parse '" + std::string(cells[c]) + "' as a real");
      values.push_back(*parsed);
    }
    ++rows;
  }
  if (rows == 0) throw EmptyInput("no data rows");

  const std::size_t channels = width - (label_index ? 1 : 0);
  if (channels == 0) throw ShapeError("no value columns");
  Matrix m(rows, channels);
  std::copy(values.begin(), values.end(), m.values().begin());
  for (std::size_t c = 0; c < channels; ++c) {
    double last = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      double& v = m(r, c);
      if (std::isnan(v)) {
        v = last;
      } else {
        last = v;
      }
    }
  }

  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!label_index || i != *label_index) names.push_back(header[i]);
  }
  std::optional<Labels> maybe_labels;
  if (label_index) maybe_labels = std::move(labels);
  return LabeledSeries(std::move(m), std::move(maybe_labels), std::move(names));
}

LabeledSeries load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options);
}

namespace {

std::string format_real(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_csv(const LabeledSeries& series, const std::filesystem::path& path) {
  auto out = open_out(path);
  const auto& m = series.values();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c) out << ',';
    out << (series.channel_names().empty() ? "c" + std::to_string(c) : series.channel_names()[c]);
  }
  if (series.has_labels()) out << ",label";
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_real(m(r, c));
    }
    if (series.has_labels()) out << ',' << (*series.labels())[r];
    out << '\n';
  }
}

void write_scores_csv(const ScoreSeries& scores, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "time_index,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out << scores.time_origin + i << ',' << format_real(scores.scores[i]) << '\n';
  }
}

ScoreSeries load_scores_csv(const std::filesystem::path& path, ScoreKind kind) {
  const auto series = load_csv(path, CsvOptions{true, std::nullopt});
  if (series.channels() != 2) throw ShapeError("score CSV must have two columns");
  ScoreSeries out;
  out.kind = kind;
  out.time_origin = static_cast<std::size_t>(series.values()(0, 0));
  out.scores.resize(series.length());
  for (std::size_t r = 0; r < series.length(); ++r) {
    if (series.values()(r, 0) != static_cast<double>(out.time_origin + r)) {
      throw ParseError(r + 2, "time_index is not contiguous");
    }
    out.scores[r] = series.values()(r, 1);
  }
  return out;
}

MinMaxStats minmax_fit(const LabeledSeries& train) {
  const auto& m = train.values();
  MinMaxStats stats;
  stats.min.assign(m.row(0).begin(), m.row(0).end());
  stats.max = stats.min;
  for (std::size_t r = 1; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      stats.min[c] = std::min(stats.min[c], m(r, c));
      stats.max[c] = std::max(stats.max[c], m(r, c));
    }
  }
  return stats;
}

LabeledSeries minmax_apply(const LabeledSeries& series, const MinMaxStats& stats) {
  if (stats.channels() != series.channels()) {
    throw ShapeError("min-max stats have " + std::to_string(stats.channels()) + " channels, series has " +
                     std::to_string(series.channels()));
  }
  Matrix out = series.values();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = stats.is_constant(c) ? 0.0 : (out(r, c) - stats.min[c]) / (stats.max[c] - stats.min[c]);
    }
  }
  return LabeledSeries(std::move(out), series.labels(), series.channel_names(), series.time_origin());
}

LabeledSeries minmax_invert(const LabeledSeries& series, const MinMaxStats& stats) {
  if (stats.channels() != series.channels()) throw ShapeError("min-max stats channel mismatch");
  Matrix out = series.values();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = stats.min[c] + out(r, c) * (stats.max[c] - stats.min[c]);
    }
  }
  return LabeledSeries(std::move(out), series.labels(), series.channel_names(), series.time_origin());
}

LabeledSeries downsample(const LabeledSeries& series, std::size_t factor) {
  if (factor == 0) throw ConfigError("downsample factor must be >= 1");
  if (factor == 1) return series;
  const auto& m = series.values();
  const std::size_t blocks = (m.rows() + factor - 1) / factor;
  Matrix out(blocks, m.cols());
  std::optional<Labels> labels;
  if (series.has_labels()) labels = Labels(blocks, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t begin = b * factor;
    const std::size_t end = std::min(begin + factor, m.rows());
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) out(b, c) += m(r, c);
      if (labels && (*series.labels())[r] == 1) (*labels)[b] = 1;
    }
    const double n = static_cast<double>(end - begin);
    for (std::size_t c = 0; c < m.cols(); ++c) out(b, c) /= n;
  }
  return LabeledSeries(std::move(out), std::move(labels), series.channel_names(), series.time_origin() / factor);
}

std::vector<std::size_t> window_starts(std::size_t length, std::size_t window_len, std::size_t stride) {
  if (window_len == 0 || stride == 0) throw ConfigError("window length and stride must be >= 1");
  if (window_len > length) {
    throw ShapeError("window length " + std::to_string(window_len) + " exceeds series length " +
                     std::to_string(length));
  }
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window_len <= length; s += stride) starts.push_back(s);
  const std::size_t last = length - window_len;
  if (starts.back() != last) starts.push_back(last);
  return starts;
}

std::vector<Window> extract_windows(const LabeledSeries& series, std::size_t window_len, std::size_t stride) {
  std::vector<Window> windows;
  for (std::size_t s : window_starts(series.length(), window_len, stride)) {
    windows.push_back(Window{s, series.values().slice_rows(s, s + window_len)});
  }
  return windows;
}

LabeledSeries slice(const LabeledSeries& series, std::size_t begin, std::size_t end) {
  if (begin >= end || end > series.length()) throw ShapeError("slice out of range");
  std::optional<Labels> labels;
  if (series.has_labels()) {
    labels = Labels(series.labels()->begin() + static_cast<std::ptrdiff_t>(begin),
                    series.labels()->begin() + static_cast<std::ptrdiff_t>(end));
  }
  return LabeledSeries(series.values().slice_rows(begin, end), std::move(labels), series.channel_names(),
                       series.time_origin() + begin);
}

}  // namespace npsr
