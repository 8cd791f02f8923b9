#pragma once

#include <cstddef>

#include "npsr/matrix.hpp"
#include "npsr/series.hpp"

namespace npsr {

/// Point and sequence reconstructions aligned on source rows [valid_begin, valid_end).
struct ReconstructionPair {
  Matrix xc_hat;
  Matrix xstar_hat;
  std::size_t valid_begin = 0;
  std::size_t valid_end = 0;

  std::size_t size() const noexcept { return valid_end - valid_begin; }
};

/// Drops the first and last gamma rows of the point reconstruction so both
/// matrices cover the same rows.
ReconstructionPair make_pair(const Matrix& point_rec, const Matrix& seq_rec, std::size_t gamma);

/// Observed rows of `series` restricted to the pair's valid range.
Matrix observed_in_range(const LabeledSeries& series, const ReconstructionPair& pair);

/// Labels trimmed to the pair's valid range.
Labels labels_in_range(const LabeledSeries& series, const ReconstructionPair& pair);

}  // namespace npsr
