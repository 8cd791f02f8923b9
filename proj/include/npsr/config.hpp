#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "npsr/evaluation.hpp"
#include "npsr/point_model.hpp"
#include "npsr/scoring.hpp"
#include "npsr/sequence_model.hpp"
#include "npsr/series.hpp"

namespace npsr {

inline constexpr const char* kVersion = "0.1.0";

struct DataSource {
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> test;
  CsvOptions csv;
  /// Generator spec with a "kind" of trig, toy or sensor; used when no paths are given.
  std::optional<nlohmann::json> synthetic;
};

/// Sections and keys of the JSON config file:
///   data:       train, test, label_column, has_header, synthetic{...}
///   preprocess: downsample, normalization ("minmax" | "none"), stride, W, W0
///   model:      D_lat; num_heads, ff_mult, N_perf, N_enc (accepted, unused)
///   training:   learn_rate, optimizer ("sgd" | "adam"), batch_size, training_epochs, seed
///   sequence:   delta, ridge_lambda          (gamma = W0 / 2)
///   induced:    gate_function, d, theta_N_ratio, theta_N
///   evaluation: point_adjust, spike_interval
///   output_dir
struct PipelineConfig {
  DataSource data;
  PreprocessSpec preprocess;
  std::size_t w0 = 50;
  PointHyperparams point;
  SequenceHyperparams sequence;
  GateKind gate = GateKind::soft;
  std::size_t d = 16;
  ThetaSource theta = ThetaSource::from_percentile(99.85);
  EvalOptions evaluation;
  std::filesystem::path output_dir = "out";

  std::size_t gamma() const noexcept { return w0 / 2; }
  /// Sequence hyperparameters with gamma and stride filled in from the preprocess section.
  SequenceHyperparams sequence_hyper() const;
  GateConfig gate_config(double theta_n) const { return {gate, theta_n, d}; }
};

/// Relative paths in the file are resolved against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical form: every key, defaults filled in.
nlohmann::json to_json(const PipelineConfig& config);

/// FNV-1a 64 of the canonical JSON without output_dir, as 16 hex digits.
std::string config_hash(const PipelineConfig& config);

}  // namespace npsr
