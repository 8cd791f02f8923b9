#pragma once

#include <filesystem>

#include "npsr/point_model.hpp"
#include "npsr/sequence_model.hpp"
#include "npsr/series.hpp"

namespace npsr {

// Line-oriented text files: a magic line, `key value` header lines, then named
// matrices as `matrix <name> <rows> <cols>` followed by row-major hexadecimal
// floating-point values. Hex floats make the round trip bit-exact.

void save_point_model(const PointModel& model, const std::filesystem::path& path);
PointModel load_point_model(const std::filesystem::path& path);

void save_sequence_model(const SequenceModel& model, const std::filesystem::path& path);
SequenceModel load_sequence_model(const std::filesystem::path& path);

void save_minmax(const MinMaxStats& stats, const std::filesystem::path& path);
MinMaxStats load_minmax(const std::filesystem::path& path);

}  // namespace npsr
