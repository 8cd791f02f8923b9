#include "npsr/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "npsr/error.hpp"
#include "npsr/simd/kernels.hpp"

namespace npsr {

std::string to_string(GateKind kind) { return kind == GateKind::hard ? "hard" : "soft"; }

GateKind parse_gate_kind(const std::string& name) {
  if (name == "soft") return GateKind::soft;
  if (name == "hard") return GateKind::hard;
  throw ConfigError("unknown gate function '" + name + "' (expected soft or hard)");
}

ScoreSeries squared_error_score(const Matrix& reconstruction, const Matrix& observed, std::size_t time_origin) {
  if (reconstruction.rows() != observed.rows() || reconstruction.cols() != observed.cols()) {
    throw ShapeError("reconstruction and observation shapes differ");
  }
  ScoreSeries out{std::vector<double>(observed.rows()), ScoreKind::anomaly, time_origin};
  for (std::size_t t = 0; t < observed.rows(); ++t) {
    out.scores[t] = simd::squared_distance(reconstruction.row(t), observed.row(t));
  }
  return out;
}

ScoreSeries anomaly_score(const ReconstructionPair& pair, const Matrix& observed) {
  if (observed.rows() != pair.size()) throw ShapeError("observed rows do not match the valid range");
  return squared_error_score(pair.xc_hat, observed, pair.valid_begin);
}

ScoreSeries nominality_score(const ReconstructionPair& pair, const Matrix& observed, double epsilon) {
  if (observed.rows() != pair.size() || observed.cols() != pair.xc_hat.cols() ||
      pair.xstar_hat.rows() != pair.size() || pair.xstar_hat.cols() != pair.xc_hat.cols()) {
    throw ShapeError("nominality inputs are not aligned");
  }
  ScoreSeries out{std::vector<double>(observed.rows()), ScoreKind::nominality, pair.valid_begin};
  for (std::size_t t = 0; t < observed.rows(); ++t) {
    const double in_dist = simd::squared_distance(pair.xc_hat.row(t), pair.xstar_hat.row(t));
    const double total = simd::squared_distance(observed.row(t), pair.xstar_hat.row(t));
    out.scores[t] = in_dist / (total + epsilon);
  }
  return out;
}

ScoreSeries induced_anomaly_score(const ScoreSeries& a, const ScoreSeries& n, const GateConfig& cfg) {
  if (a.size() != n.size()) {
    throw ShapeError("anomaly and nominality lengths differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(n.size()) + ")");
  }
  if (!(cfg.theta_n > 0.0)) throw ConfigError("theta_N must be > 0");
  const std::size_t len = a.size();
  const std::size_t d = cfg.induction_length;

  std::vector<double> g(len);
  for (std::size_t k = 0; k < len; ++k) g[k] = gate(cfg.kind, cfg.theta_n, n.scores[k]);

  ScoreSeries out{std::vector<double>(len), ScoreKind::induced, a.time_origin};
  for (std::size_t t = 0; t < len; ++t) {
    double acc = a.scores[t];
    // tau < t: A(tau) * g(tau+1) * ... * g(t)
    double product = 1.0;
    const std::size_t left = std::min(d, t);
    for (std::size_t j = 1; j <= left; ++j) {
      product *= g[t - j + 1];
      if (product == 0.0) break;
      acc += a.scores[t - j] * product;
    }
    // tau > t: A(tau) * g(tau-1) * ... * g(t)
    product = 1.0;
    const std::size_t right = std::min(d, len - 1 - t);
    for (std::size_t j = 1; j <= right; ++j) {
      product *= g[t + j - 1];
      if (product == 0.0) break;
      acc += a.scores[t + j] * product;
    }
    out.scores[t] = acc;
  }
  return out;
}

ScoreSeries smoothed_score(const ScoreSeries& a, std::size_t d) {
  const std::size_t len = a.size();
  ScoreSeries out{std::vector<double>(len), ScoreKind::induced, a.time_origin};
  for (std::size_t t = 0; t < len; ++t) {
    double acc = a.scores[t];
    const std::size_t left = std::min(d, t);
    for (std::size_t j = 1; j <= left; ++j) acc += a.scores[t - j];
    const std::size_t right = std::min(d, len - 1 - t);
    for (std::size_t j = 1; j <= right; ++j) acc += a.scores[t + j];
    out.scores[t] = acc;
  }
  return out;
}

double theta_from_percentile(std::span<const double> train_nominality, double percentile) {
  if (train_nominality.empty()) throw EmptyInput("no training nominality scores");
  if (!(percentile > 0.0 && percentile <= 100.0)) throw ConfigError("percentile must be in (0, 100]");
  std::vector<double> sorted(train_nominality.begin(), train_nominality.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // p * n is exact for the usual inputs; the slack absorbs representation error in p.
  const double exact_rank = percentile * n / 100.0;
  auto rank = static_cast<std::size_t>(std::ceil(exact_rank - 1e-9 * std::max(1.0, exact_rank)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

double resolve_theta(const ThetaSource& source, std::span<const double> train_nominality) {
  if (source.value) {
    if (!(*source.value > 0.0)) throw ConfigError("explicit theta_N must be > 0");
    return *source.value;
  }
  if (source.percentile) return theta_from_percentile(train_nominality, *source.percentile);
  throw ConfigError("theta_N needs either a value or a percentile");
}

}  // namespace npsr
