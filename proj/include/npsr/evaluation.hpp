#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "npsr/series.hpp"

namespace npsr {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const int> pred, std::span<const int> labels);

/// 2TP / (2TP + FP + FN), and 0 when TP = 0.
double f1_score(const Confusion& c);

struct CurveRow {
  double threshold;
  double precision;
  double recall;
  double f1;
};

struct EvalReport {
  double best_f1 = 0.0;
  double best_threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::optional<double> pa_best_f1;
  std::optional<double> spiked_pa_best_f1;
  double auc = 0.0;
  std::vector<CurveRow> curve;  ///< ascending threshold
};

/// Threshold sweep over every distinct score plus one value above the max;
/// prediction is score >= threshold. Ties in F1 go to the smallest threshold.
/// Fills curve, best_f1, best_threshold, precision, recall and auc.
EvalReport best_f1(const ScoreSeries& scores, std::span<const int> labels);

/// Every run of true anomalies containing at least one positive prediction
/// becomes fully positive.
Labels point_adjust(std::span<const int> pred, std::span<const int> labels);

/// Best F1 of point-adjusted predictions over the same threshold sweep.
double pa_best_f1(const ScoreSeries& scores, std::span<const int> labels);

/// ROC-AUC as the Mann-Whitney statistic with midranks for ties.
double auc(const ScoreSeries& scores, std::span<const int> labels);

/// Indices 0, s, 2s, ... set to the largest finite double.
ScoreSeries spike_augment(const ScoreSeries& scores, std::size_t interval);

struct EvalOptions {
  bool point_adjust = false;
  std::optional<std::size_t> spike_interval;
};

EvalReport evaluate(const ScoreSeries& scores, std::span<const int> labels, const EvalOptions& options = {});

nlohmann::json to_json(const EvalReport& report);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);
void write_curve_csv(const EvalReport& report, const std::filesystem::path& path);

}  // namespace npsr
