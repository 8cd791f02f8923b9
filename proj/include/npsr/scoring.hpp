#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>

#include "npsr/matrix.hpp"
#include "npsr/reconstruction.hpp"
#include "npsr/series.hpp"

namespace npsr {

enum class GateKind { soft, hard };

std::string to_string(GateKind kind);
GateKind parse_gate_kind(const std::string& name);

/// Where theta_N comes from: an explicit value, or a percentile of the
/// training nominality scores.
struct ThetaSource {
  std::optional<double> value;
  std::optional<double> percentile;

  static ThetaSource explicit_value(double v) { return {v, std::nullopt}; }
  static ThetaSource from_percentile(double p) { return {std::nullopt, p}; }
};

struct GateConfig {
  GateKind kind = GateKind::soft;
  double theta_n = std::numeric_limits<double>::max();
  std::size_t induction_length = 0;  ///< d
};

constexpr double kNominalityEpsilon = 1e-12;

/// Squared L2 distance between each reconstructed and observed row.
ScoreSeries squared_error_score(const Matrix& reconstruction, const Matrix& observed, std::size_t time_origin);

/// A(t) = |xc_hat_t - x0_t|^2 over the pair's valid range.
ScoreSeries anomaly_score(const ReconstructionPair& pair, const Matrix& observed);

/// N(t) = |xc_hat_t - xstar_hat_t|^2 / (|x0_t - xstar_hat_t|^2 + epsilon).
ScoreSeries nominality_score(const ReconstructionPair& pair, const Matrix& observed,
                             double epsilon = kNominalityEpsilon);

/// Soft: max(0, 1 - n/theta). Hard: 1 if n < theta else 0.
inline double gate(GateKind kind, double theta_n, double n) {
  if (kind == GateKind::hard) return n < theta_n ? 1.0 : 0.0;
  const double g = 1.0 - n / theta_n;
  return g > 0.0 ? g : 0.0;
}

/// Induced anomaly score. For each t the sum runs over tau in [t-d, t+d]
/// (clipped), where A(tau) is multiplied by the gates of every index strictly
/// after tau up to and including t. Terms are accumulated as A(t), then
/// tau = t-1, t-2, ..., then tau = t+1, t+2, ...; a side stops once its gate
/// product reaches zero.
ScoreSeries induced_anomaly_score(const ScoreSeries& a, const ScoreSeries& n, const GateConfig& cfg);

/// Unnormalized moving sum over [t-d, t+d], summed in the same order as
/// induced_anomaly_score, so it equals the hard gate with an unreachable theta.
ScoreSeries smoothed_score(const ScoreSeries& a, std::size_t d);

/// Nearest-rank percentile: the smallest sample with at least p% of samples <= it.
double theta_from_percentile(std::span<const double> train_nominality, double percentile);

/// Explicit theta, or the percentile of `train_nominality`.
double resolve_theta(const ThetaSource& source, std::span<const double> train_nominality);

}  // namespace npsr
