#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "npsr/matrix.hpp"
#include "npsr/series.hpp"

namespace npsr {

// -- Gaussian toy -------------------------------------------------------------

struct ToySpec {
  std::size_t D = 2;
  double alpha = 2.0;
  std::size_t n_normal = 100000;
  std::size_t n_anomaly = 100000;
  std::uint64_t seed = 0;
};

struct ToySample {
  std::vector<double> dxc;
  std::vector<double> dxp;
  int label = 0;
  double nominality = 0.0;  ///< |dxc|^2 / |dxc + dxp|^2
};

/// Normal samples: dxc, dxp ~ N(0, I). Anomalies: dxc ~ N(0, I), dxp ~ N(0, alpha^2 I).
/// All normal samples are drawn first, then the anomalies. The visitor sees
/// each sample once; its buffers are reused between calls.
void gen_toy_visit(const ToySpec& spec, const std::function<void(const ToySample&)>& visit);

struct ToyDataset {
  std::vector<ToySample> samples;
  std::vector<double> normal_nominality;
  std::vector<double> anomaly_nominality;
};

ToyDataset gen_toy(const ToySpec& spec);

/// Nominality values only; same draws as gen_toy.
struct ToyNominality {
  std::vector<double> normal;
  std::vector<double> anomaly;
};

ToyNominality toy_nominality(const ToySpec& spec);

/// (sum u_i^2 / D) / (sum v_j^2 / D) with independent standard normals.
std::vector<double> f_reference_sample(std::size_t D, std::size_t count, std::uint64_t seed);

// -- circular sensor ----------------------------------------------------------

enum class PointTag { normal, point, contextual, both };

std::string to_string(PointTag tag);

struct NoisePoint {
  std::size_t t;  ///< 1-based
  double wx;
  double wy;
};

struct SensorSpec {
  double omega = 0.1;
  double omega_slow = 0.05;
  double r = 1.0;
  double r_min = 0.9;
  double r_max = 1.1;
  std::size_t T = 200;
  std::size_t t1 = 1;  ///< slowdown interval, 1-based inclusive; t1 > t2 disables it
  std::size_t t2 = 0;
  std::vector<NoisePoint> noise;
  std::size_t random_noise = 0;  ///< extra seeded noise points
  double noise_scale = 0.5;
  std::uint64_t seed = 0;
};

struct SensorData {
  LabeledSeries series;
  Matrix nominal;     ///< x*_t
  Matrix contextual;  ///< in-distribution deviation
  Matrix point;       ///< noise deviation
  std::vector<PointTag> tags;
};

SensorData gen_sensor(const SensorSpec& spec);

// -- trigonometric dataset ----------------------------------------------------

enum class TrigAnomalyKind { point_noise, frequency_shift, amplitude_shift };

std::string to_string(TrigAnomalyKind kind);
TrigAnomalyKind parse_trig_anomaly_kind(const std::string& name);

struct TrigSegment {
  std::size_t start;  ///< test-split row, inclusive
  std::size_t end;    ///< exclusive
  TrigAnomalyKind kind;
};

struct TrigSpec {
  std::size_t D = 35;
  std::size_t T_train = 10000;
  std::size_t T_test = 7680;
  std::vector<TrigSegment> segments;
  /// Channel j oscillates at base_frequencies[j % K]. Amplitudes and phases
  /// are drawn from the seed when left empty.
  std::vector<double> base_frequencies{0.0647, 0.0282};
  std::vector<double> amplitudes;
  std::vector<double> phases;
  double noise_sigma = 0.1;
  double shift_channel_fraction = 0.1;
  double frequency_shift_factor = 1.6;
  double amplitude_shift_factor = 1.5;
  double point_noise_scale = 0.3;
  std::optional<double> target_rate;
  std::uint64_t seed = 0;
};

struct TrigData {
  LabeledSeries train;
  LabeledSeries test;
  double anomaly_rate = 0.0;
  std::vector<std::size_t> shifted_channels;
  std::vector<double> amplitudes;
};

/// Train split is anomaly-free; the test split continues the same clock and is
/// labeled 1 exactly on the configured segments.
TrigData gen_trig(const TrigSpec& spec);

/// One 160-row frequency-shift segment plus 20 scattered single-row noise
/// anomalies in a 7680-row test split (180 / 7680 = 2.34%).
TrigSpec trig_preset(std::uint64_t seed = 0);

// -- JSON sidecars ------------------------------------------------------------

nlohmann::json to_json(const ToySpec& spec);
nlohmann::json to_json(const SensorSpec& spec);
nlohmann::json to_json(const TrigSpec& spec);
ToySpec toy_spec_from_json(const nlohmann::json& j);
SensorSpec sensor_spec_from_json(const nlohmann::json& j);
/// Starts from trig_preset(seed) when "preset" is true, else from defaults.
TrigSpec trig_spec_from_json(const nlohmann::json& j);

}  // namespace npsr
