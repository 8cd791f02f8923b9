#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "npsr/matrix.hpp"

namespace npsr {

using Labels = std::vector<int>;

/// Observed multivariate series: T rows (time) by D columns (channels), with
/// optional 0/1 labels. Validated on construction and immutable afterwards.
class LabeledSeries {
 public:
  LabeledSeries(Matrix values, std::optional<Labels> labels = std::nullopt,
                std::vector<std::string> channel_names = {}, std::size_t time_origin = 0);

  const Matrix& values() const noexcept { return values_; }
  const std::optional<Labels>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<std::string>& channel_names() const noexcept { return channel_names_; }
  std::size_t time_origin() const noexcept { return time_origin_; }

  std::size_t length() const noexcept { return values_.rows(); }
  std::size_t channels() const noexcept { return values_.cols(); }

  /// Labels, throwing LabelError when the series is unlabeled.
  const Labels& require_labels() const;

 private:
  Matrix values_;
  std::optional<Labels> labels_;
  std::vector<std::string> channel_names_;
  std::size_t time_origin_;
};

enum class ScoreKind { anomaly, nominality, induced };

std::string to_string(ScoreKind kind);

struct ScoreSeries {
  std::vector<double> scores;
  ScoreKind kind = ScoreKind::anomaly;
  std::size_t time_origin = 0;

  std::size_t size() const noexcept { return scores.size(); }
};

struct CsvOptions {
  bool has_header = true;
  /// Header name, or a zero-based column index written as digits.
  std::optional<std::string> label_column;
};

/// Reads comma-separated reals. Empty or NaN cells are forward-filled; a
/// missing first value becomes 0.
LabeledSeries load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
LabeledSeries parse_csv(const std::string& text, const CsvOptions& options = {});

/// Writes values (and a trailing "label" column when labeled) with a header row
/// and round-trip precision.
void write_csv(const LabeledSeries& series, const std::filesystem::path& path);

/// Two columns: time_index (time_origin applied), score.
void write_scores_csv(const ScoreSeries& scores, const std::filesystem::path& path);
ScoreSeries load_scores_csv(const std::filesystem::path& path, ScoreKind kind);

// -- preprocessing ----------------------------------------------------------

struct PreprocessSpec {
  std::size_t downsample_factor = 1;
  bool normalize = true;
  std::size_t stride = 10;
  std::size_t window_len = 50;
};

struct MinMaxStats {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t channels() const noexcept { return min.size(); }
  bool is_constant(std::size_t channel) const { return min[channel] == max[channel]; }
};

MinMaxStats minmax_fit(const LabeledSeries& train);

/// (x - min) / (max - min) per channel; constant channels map to 0. No clipping.
LabeledSeries minmax_apply(const LabeledSeries& series, const MinMaxStats& stats);

/// Inverse of minmax_apply for non-constant channels (constant channels map back to min).
LabeledSeries minmax_invert(const LabeledSeries& series, const MinMaxStats& stats);

/// Block means over consecutive groups of `factor` rows; a block is labeled 1
/// when any of its rows is. A trailing partial block is kept.
LabeledSeries downsample(const LabeledSeries& series, std::size_t factor);

/// Starts at 0, stride, 2*stride, ... plus a final window anchored at T - len so
/// every index is covered.
std::vector<std::size_t> window_starts(std::size_t length, std::size_t window_len, std::size_t stride);

struct Window {
  std::size_t start;
  Matrix values;
};

std::vector<Window> extract_windows(const LabeledSeries& series, std::size_t window_len, std::size_t stride);

/// Rows [begin, end) with labels and time_origin carried along.
LabeledSeries slice(const LabeledSeries& series, std::size_t begin, std::size_t end);

}  // namespace npsr
