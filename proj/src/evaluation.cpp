#include "npsr/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "npsr/error.hpp"

namespace npsr {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw ShapeError("length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

std::size_t check_labels(const ScoreSeries& scores, std::span<const int> labels) {
  check_lengths(scores.size(), labels.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw LabelError("label at index " + std::to_string(i) + " is not 0/1");
    positives += static_cast<std::size_t>(labels[i]);
    if (std::isnan(scores.scores[i])) throw ShapeError("NaN score at index " + std::to_string(i));
  }
  if (positives == 0 || positives == labels.size()) {
    throw DegenerateLabels("labels must contain both 0 and 1");
  }
  return positives;
}

// Distinct values, descending.
std::vector<double> distinct_desc(const std::vector<double>& values) {
  std::vector<double> out(values);
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// (key, weight, is_positive) events swept from high keys to low.
struct Event {
  double key;
  std::size_t weight;
  bool positive;
};

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Confusion confusion(std::span<const int> pred, std::span<const int> labels) {
  check_lengths(pred.size(), labels.size());
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i]) {
      labels[i] ? ++c.tp : ++c.fp;
    } else {
      labels[i] ? ++c.fn : ++c.tn;
    }
  }
  return c;
}

double f1_score(const Confusion& c) {
  if (c.tp == 0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
}

EvalReport best_f1(const ScoreSeries& scores, std::span<const int> labels) {
  const std::size_t positives = check_labels(scores, labels);
  const std::size_t n = scores.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores.scores[a] > scores.scores[b]; });

  EvalReport report;
  const double top = scores.scores[order.front()];
  const double sentinel = std::nextafter(top, std::numeric_limits<double>::infinity());
  report.curve.push_back({sentinel, 0.0, 0.0, 0.0});

  Confusion c;
  c.fn = positives;
  c.tn = n - positives;
  std::size_t i = 0;
  while (i < n) {
    const double theta = scores.scores[order[i]];
    for (; i < n && scores.scores[order[i]] == theta; ++i) {
      if (labels[order[i]]) {
        ++c.tp;
        --c.fn;
      } else {
        ++c.fp;
        --c.tn;
      }
    }
    const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall = static_cast<double>(c.tp) / static_cast<double>(positives);
    report.curve.push_back({theta, precision, recall, f1_score(c)});
  }
  std::reverse(report.curve.begin(), report.curve.end());

  // Ascending order: the first maximum is the smallest threshold.
  const CurveRow* best = &report.curve.front();
  for (const auto& row : report.curve) {
    if (row.f1 > best->f1) best = &row;
  }
  report.best_f1 = best->f1;
  report.best_threshold = best->threshold;
  report.precision = best->precision;
  report.recall = best->recall;
  report.auc = auc(scores, labels);
  return report;
}

Labels point_adjust(std::span<const int> pred, std::span<const int> labels) {
  check_lengths(pred.size(), labels.size());
  Labels out(pred.begin(), pred.end());
  std::size_t i = 0;
  while (i < labels.size()) {
    if (!labels[i]) {
      ++i;
      continue;
    }
    std::size_t end = i;
    bool hit = false;
    for (; end < labels.size() && labels[end]; ++end) hit = hit || pred[end];
    if (hit) std::fill(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(end), 1);
    i = end;
  }
  return out;
}

double pa_best_f1(const ScoreSeries& scores, std::span<const int> labels) {
  const std::size_t positives = check_labels(scores, labels);
  const auto& a = scores.scores;

  // A run is detected at threshold theta iff its max score >= theta; a normal
  // point is a false positive iff its score >= theta.
  std::vector<Event> events;
  std::size_t i = 0;
  while (i < a.size()) {
    if (!labels[i]) {
      events.push_back({a[i], 1, false});
      ++i;
      continue;
    }
    std::size_t end = i;
    double peak = a[i];
    for (; end < a.size() && labels[end]; ++end) peak = std::max(peak, a[end]);
    events.push_back({peak, end - i, true});
    i = end;
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.key > y.key; });

  double best = 0.0;
  Confusion c;
  c.fn = positives;
  std::size_t e = 0;
  for (double theta : distinct_desc(a)) {
    for (; e < events.size() && events[e].key >= theta; ++e) {
      if (events[e].positive) {
        c.tp += events[e].weight;
        c.fn -= events[e].weight;
      } else {
        c.fp += events[e].weight;
      }
    }
    best = std::max(best, f1_score(c));
  }
  return best;
}

double auc(const ScoreSeries& scores, std::span<const int> labels) {
  const std::size_t positives = check_labels(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return scores.scores[x] < scores.scores[y]; });

  // Sum of 1-based midranks of the positives, kept doubled to stay integral.
  std::size_t rank_sum2 = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    std::size_t tied_pos = 0;
    for (; j < n && scores.scores[order[j]] == scores.scores[order[i]]; ++j) {
      tied_pos += static_cast<std::size_t>(labels[order[j]]);
    }
    rank_sum2 += tied_pos * (i + 1 + j);
    i = j;
  }
  const double negatives = static_cast<double>(n - positives);
  const double u = static_cast<double>(rank_sum2) / 2.0 -
                   static_cast<double>(positives) * static_cast<double>(positives + 1) / 2.0;
  return u / (static_cast<double>(positives) * negatives);
}

ScoreSeries spike_augment(const ScoreSeries& scores, std::size_t interval) {
  if (interval == 0) throw ConfigError("spike interval must be >= 1");
  ScoreSeries out = scores;
  for (std::size_t i = 0; i < out.size(); i += interval) out.scores[i] = std::numeric_limits<double>::max();
  return out;
}

EvalReport evaluate(const ScoreSeries& scores, std::span<const int> labels, const EvalOptions& options) {
  EvalReport report = best_f1(scores, labels);
  if (options.point_adjust) report.pa_best_f1 = pa_best_f1(scores, labels);
  if (options.spike_interval) {
    report.spiked_pa_best_f1 = pa_best_f1(spike_augment(scores, *options.spike_interval), labels);
  }
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["best_f1"] = report.best_f1;
  j["best_threshold"] = report.best_threshold;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  if (report.pa_best_f1) j["pa_best_f1"] = *report.pa_best_f1;
  if (report.spiked_pa_best_f1) j["spiked_pa_best_f1"] = *report.spiked_pa_best_f1;
  j["auc"] = report.auc;
  auto curve = nlohmann::json::array();
  for (const auto& row : report.curve) {
    // JSON has no infinity; the sentinel row can overflow when the max is huge.
    nlohmann::json threshold = std::isfinite(row.threshold) ? nlohmann::json(row.threshold) : nlohmann::json("inf");
    curve.push_back({threshold, row.precision, row.recall, row.f1});
  }
  j["curve"] = std::move(curve);
  return j;
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(report).dump(2) << '\n';
}

void write_curve_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "threshold,precision,recall,f1\n";
  for (const auto& row : report.curve) {
    out << format_double(row.threshold) << ',' << format_double(row.precision) << ','
        << format_double(row.recall) << ',' << format_double(row.f1) << '\n';
  }
}

}  // namespace npsr
