#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "npsr/config.hpp"
#include "npsr/evaluation.hpp"
#include "npsr/point_model.hpp"
#include "npsr/reconstruction.hpp"
#include "npsr/scoring.hpp"
#include "npsr/sequence_model.hpp"
#include "npsr/series.hpp"

namespace npsr {

struct Dataset {
  LabeledSeries train;
  LabeledSeries test;
};

/// Raw train/test splits from CSV paths or the synthetic trig generator.
Dataset load_dataset(const PipelineConfig& config);

/// Downsampling, then min-max with statistics from the training split.
struct PreparedData {
  Dataset data;
  std::optional<MinMaxStats> minmax;
};

PreparedData prepare(const Dataset& raw, const PreprocessSpec& spec);
/// Same, reusing previously fitted statistics.
PreparedData prepare(const Dataset& raw, const PreprocessSpec& spec, const std::optional<MinMaxStats>& minmax);

struct TrainedModels {
  PointModel point;
  SequenceModel sequence;
};

TrainedModels train_models(const PipelineConfig& config, const LabeledSeries& train);

/// A, N and the sequence-only squared error of one series over its valid range.
struct SeriesScores {
  ScoreSeries anomaly;
  ScoreSeries nominality;
  ScoreSeries sequence_error;
  std::size_t valid_begin = 0;
  std::size_t valid_end = 0;
};

SeriesScores score_series(const TrainedModels& models, const LabeledSeries& series);

struct ScoreBundle {
  SeriesScores test;
  ScoreSeries induced;
  std::vector<double> train_nominality;
  double theta_n = 0.0;
  std::optional<Labels> labels;  ///< test labels over the valid range
};

ScoreBundle compute_scores(const PipelineConfig& config, const TrainedModels& models, const LabeledSeries& train,
                           const LabeledSeries& test);

/// Labels of `series` at the rows named by the score's time_origin.
Labels align_labels(const LabeledSeries& series, const ScoreSeries& scores);

struct PipelineResult {
  TrainedModels models;
  ScoreBundle scores;
  EvalReport report;
};

/// Load, prepare, train, score and evaluate without touching the filesystem
/// beyond reading inputs.
PipelineResult run_pipeline(const PipelineConfig& config);

// -- ablation sweep -------------------------------------------------------------

inline const std::vector<std::size_t> kSweepDs{1, 2, 4, 8, 16, 32, 64, 128, 256};

struct SweepCell {
  std::string method;
  std::size_t d;
  double auc;
  double f1;
};

struct SweepSummary {
  std::string method;
  double auc_mean, auc_sd;
  double f1_mean, f1_sd;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepSummary> summary;  ///< population standard deviation over d
};

/// Methods: point, sequence, hard_theta_inf, hard_theta_N, soft_theta_N.
/// Each d is evaluated on its own thread.
SweepResult sweep(const ScoreBundle& bundle, const std::vector<std::size_t>& ds = kSweepDs);

nlohmann::json to_json(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);

// -- commands -------------------------------------------------------------------

/// Every command writes its outputs and a `<command>_manifest.json` into the
/// configured output directory.
void cmd_synth(const PipelineConfig& config, std::ostream& log);
void cmd_train(const PipelineConfig& config, std::ostream& log);
void cmd_score(const PipelineConfig& config, std::ostream& log);
void cmd_eval(const PipelineConfig& config, const std::optional<std::filesystem::path>& scores_path,
              std::ostream& log);
void cmd_sweep(const PipelineConfig& config, std::ostream& log);

nlohmann::json manifest(const PipelineConfig& config, const std::string& command);

}  // namespace npsr
