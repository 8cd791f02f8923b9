#include "npsr/reconstruction.hpp"

#include <string>

#include "npsr/error.hpp"

namespace npsr {

ReconstructionPair make_pair(const Matrix& point_rec, const Matrix& seq_rec, std::size_t gamma) {
  const std::size_t length = point_rec.rows();
  if (2 * gamma >= length) throw ShapeError("gamma too large for series length " + std::to_string(length));
  if (seq_rec.rows() != length - 2 * gamma) {
    throw ShapeError("sequence reconstruction has " + std::to_string(seq_rec.rows()) + " rows, expected " +
                     std::to_string(length - 2 * gamma));
  }
  if (seq_rec.cols() != point_rec.cols()) throw ShapeError("reconstruction channel counts differ");
  ReconstructionPair pair;
  pair.xc_hat = point_rec.slice_rows(gamma, length - gamma);
  pair.xstar_hat = seq_rec;
  pair.valid_begin = gamma;
  pair.valid_end = length - gamma;
  return pair;
}

Matrix observed_in_range(const LabeledSeries& series, const ReconstructionPair& pair) {
  if (pair.valid_end > series.length()) throw ShapeError("valid range exceeds series length");
  return series.values().slice_rows(pair.valid_begin, pair.valid_end);
}

Labels labels_in_range(const LabeledSeries& series, const ReconstructionPair& pair) {
  const Labels& all = series.require_labels();
  if (pair.valid_end > all.size()) throw ShapeError("valid range exceeds label length");
  return Labels(all.begin() + static_cast<std::ptrdiff_t>(pair.valid_begin),
                all.begin() + static_cast<std::ptrdiff_t>(pair.valid_end));
}

}  // namespace npsr
