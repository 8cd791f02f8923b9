#include "npsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "npsr/error.hpp"
#include "npsr/rng.hpp"

namespace npsr {

namespace {

void check_toy(const ToySpec& spec) {
  if (spec.D < 1) throw SpecError("toy D must be >= 1");
  if (!(spec.alpha > 0.0)) throw SpecError("toy alpha must be > 0");
  if (spec.n_normal < 1 || spec.n_anomaly < 1) throw SpecError("toy sample counts must be >= 1");
}

double sum_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

// -- toy ------------------------------------------------------------------------

void gen_toy_visit(const ToySpec& spec, const std::function<void(const ToySample&)>& visit) {
  check_toy(spec);
  Rng rng(spec.seed);
  ToySample s;
  s.dxc.resize(spec.D);
  s.dxp.resize(spec.D);
  const std::size_t total = spec.n_normal + spec.n_anomaly;
  for (std::size_t i = 0; i < total; ++i) {
    const bool anomaly = i >= spec.n_normal;
    const double scale = anomaly ? spec.alpha : 1.0;
    for (auto& x : s.dxc) x = rng.normal();
    for (auto& x : s.dxp) x = scale * rng.normal();
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < spec.D; ++k) {
      num += s.dxc[k] * s.dxc[k];
      const double total_dev = s.dxc[k] + s.dxp[k];
      den += total_dev * total_dev;
    }
    s.label = anomaly ? 1 : 0;
    s.nominality = num / den;
    visit(s);
  }
}

ToyDataset gen_toy(const ToySpec& spec) {
  ToyDataset out;
  out.samples.reserve(spec.n_normal + spec.n_anomaly);
  gen_toy_visit(spec, [&](const ToySample& s) {
    out.samples.push_back(s);
    (s.label ? out.anomaly_nominality : out.normal_nominality).push_back(s.nominality);
  });
  return out;
}

ToyNominality toy_nominality(const ToySpec& spec) {
  ToyNominality out;
  out.normal.reserve(spec.n_normal);
  out.anomaly.reserve(spec.n_anomaly);
  gen_toy_visit(spec, [&](const ToySample& s) { (s.label ? out.anomaly : out.normal).push_back(s.nominality); });
  return out;
}

std::vector<double> f_reference_sample(std::size_t D, std::size_t count, std::uint64_t seed) {
  if (D < 1 || count < 1) throw SpecError("F reference needs D >= 1 and count >= 1");
  Rng rng(seed);
  std::vector<double> out(count);
  std::vector<double> u(D), v(D);
  const double dd = static_cast<double>(D);
  for (auto& sample : out) {
    for (auto& x : u) x = rng.normal();
    for (auto& x : v) x = rng.normal();
    sample = (sum_squares(u) / dd) / (sum_squares(v) / dd);
  }
  return out;
}

// -- sensor -----------------------------------------------------------------------

std::string to_string(PointTag tag) {
  switch (tag) {
    case PointTag::normal: return "normal";
    case PointTag::point: return "point";
    case PointTag::contextual: return "contextual";
    case PointTag::both: return "both";
  }
  return "?";
}

SensorData gen_sensor(const SensorSpec& spec) {
  if (spec.T < 1) throw SpecError("sensor T must be >= 1");
  if (!(spec.r_min <= spec.r && spec.r <= spec.r_max)) throw SpecError("radius r must lie in [r_min, r_max]");
  const bool slowdown = spec.t1 <= spec.t2;
  if (slowdown && (spec.t1 < 1 || spec.t2 > spec.T)) throw SpecError("slowdown interval outside [1, T]");

  const std::size_t T = spec.T;
  Matrix nominal(T, 2), ctx(T, 2), pt(T, 2), obs(T, 2);

  std::vector<NoisePoint> noise = spec.noise;
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.random_noise; ++i) {
    const std::size_t t = 1 + rng.below(T);
    const double wx = spec.noise_scale * rng.normal();
    const double wy = spec.noise_scale * rng.normal();
    noise.push_back({t, wx, wy});
  }
  for (const auto& n : noise) {
    if (n.t < 1 || n.t > T) {
      throw SpecError("noise point t=" + std::to_string(n.t) + " outside [1, " + std::to_string(T) + "]");
    }
    pt(n.t - 1, 0) += n.wx;
    pt(n.t - 1, 1) += n.wy;
  }

  Labels labels(T, 0);
  std::vector<PointTag> tags(T, PointTag::normal);
  for (std::size_t i = 0; i < T; ++i) {
    const double t = static_cast<double>(i + 1);
    nominal(i, 0) = spec.r * std::cos(spec.omega * t);
    nominal(i, 1) = spec.r * std::sin(spec.omega * t);
    if (slowdown && i + 1 >= spec.t1 && i + 1 <= spec.t2) {
      ctx(i, 0) = spec.r * (std::cos(spec.omega_slow * t) - std::cos(spec.omega * t));
      ctx(i, 1) = spec.r * (std::sin(spec.omega_slow * t) - std::sin(spec.omega * t));
    }
    for (std::size_t c = 0; c < 2; ++c) obs(i, c) = nominal(i, c) + ctx(i, c) + pt(i, c);

    const bool has_ctx = ctx(i, 0) != 0.0 || ctx(i, 1) != 0.0;
    const bool has_noise = pt(i, 0) != 0.0 || pt(i, 1) != 0.0;
    const double radius2 = obs(i, 0) * obs(i, 0) + obs(i, 1) * obs(i, 1);
    const bool inside = spec.r_min * spec.r_min <= radius2 && radius2 <= spec.r_max * spec.r_max;
    if (has_noise && !inside) {
      tags[i] = has_ctx ? PointTag::both : PointTag::point;
    } else if (has_ctx || has_noise) {
      tags[i] = PointTag::contextual;
    }
    labels[i] = tags[i] == PointTag::normal ? 0 : 1;
  }
  return SensorData{LabeledSeries(std::move(obs), std::move(labels), {"x", "y"}), std::move(nominal), std::move(ctx),
                    std::move(pt), std::move(tags)};
}

// -- trig ---------------------------------------------------------------------------

std::string to_string(TrigAnomalyKind kind) {
  switch (kind) {
    case TrigAnomalyKind::point_noise: return "point-noise";
    case TrigAnomalyKind::frequency_shift: return "frequency-shift";
    case TrigAnomalyKind::amplitude_shift: return "amplitude-shift";
  }
  return "?";
}

TrigAnomalyKind parse_trig_anomaly_kind(const std::string& name) {
  if (name == "point-noise") return TrigAnomalyKind::point_noise;
  if (name == "frequency-shift") return TrigAnomalyKind::frequency_shift;
  if (name == "amplitude-shift") return TrigAnomalyKind::amplitude_shift;
  throw SpecError("unknown anomaly kind '" + name + "'");
}

TrigData gen_trig(const TrigSpec& spec) {
  const std::size_t D = spec.D;
  if (D < 1 || spec.T_train < 1 || spec.T_test < 1) throw SpecError("trig D, T_train and T_test must be >= 1");
  if (spec.base_frequencies.empty()) throw SpecError("trig needs at least one base frequency");
  if (!spec.amplitudes.empty() && spec.amplitudes.size() != D) throw SpecError("amplitudes must have D entries");
  if (!spec.phases.empty() && spec.phases.size() != D) throw SpecError("phases must have D entries");
  if (!(spec.shift_channel_fraction > 0.0 && spec.shift_channel_fraction <= 1.0)) {
    throw SpecError("shift_channel_fraction must be in (0, 1]");
  }

  std::vector<TrigSegment> segments = spec.segments;
  std::sort(segments.begin(), segments.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (s.start >= s.end || s.end > spec.T_test) {
      throw SpecError("segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) + ") outside test split of " +
                      std::to_string(spec.T_test) + " rows");
    }
    if (i > 0 && s.start < segments[i - 1].end) throw SpecError("segments overlap");
  }

  std::size_t anomalous = 0;
  for (const auto& s : segments) anomalous += s.end - s.start;
  const double rate = static_cast<double>(anomalous) / static_cast<double>(spec.T_test);
  if (spec.target_rate && std::abs(rate - *spec.target_rate) > 0.0005) {
    throw SpecError("segments give anomaly rate " + std::to_string(rate) + ", target " +
                    std::to_string(*spec.target_rate));
  }

  Rng rng(spec.seed);
  std::vector<double> amp = spec.amplitudes;
  std::vector<double> phase = spec.phases;
  if (amp.empty()) {
    amp.resize(D);
    for (auto& a : amp) a = rng.uniform(0.5, 1.5);
  }
  if (phase.empty()) {
    phase.resize(D);
    for (auto& p : phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  std::vector<std::size_t> perm(D);
  for (std::size_t j = 0; j < D; ++j) perm[j] = j;
  rng.shuffle(perm.begin(), perm.end());
  const auto n_shift = static_cast<std::size_t>(std::ceil(spec.shift_channel_fraction * static_cast<double>(D)));
  std::vector<std::size_t> shifted(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(std::min(n_shift, D)));
  std::sort(shifted.begin(), shifted.end());
  std::vector<char> is_shifted(D, 0);
  for (auto j : shifted) is_shifted[j] = 1;

  const std::size_t K = spec.base_frequencies.size();
  auto clean = [&](std::size_t j, double t) { return amp[j] * std::sin(spec.base_frequencies[j % K] * t + phase[j]); };

  Matrix train(spec.T_train, D);
  for (std::size_t i = 0; i < spec.T_train; ++i) {
    const double t = static_cast<double>(i);
    for (std::size_t j = 0; j < D; ++j) train(i, j) = clean(j, t) + spec.noise_sigma * rng.normal();
  }

  Matrix test(spec.T_test, D);
  Labels labels(spec.T_test, 0);
  std::size_t next = 0;
  for (std::size_t i = 0; i < spec.T_test; ++i) {
    while (next < segments.size() && segments[next].end <= i) ++next;
    const TrigSegment* seg = (next < segments.size() && segments[next].start <= i) ? &segments[next] : nullptr;
    const double t = static_cast<double>(spec.T_train + i);
    for (std::size_t j = 0; j < D; ++j) {
      double v = clean(j, t);
      if (seg && is_shifted[j]) {
        if (seg->kind == TrigAnomalyKind::frequency_shift) {
          // Phase-continuous at the segment start.
          const double w = spec.base_frequencies[j % K];
          const double t0 = static_cast<double>(spec.T_train + seg->start);
          v = amp[j] * std::sin(w * t0 + phase[j] + spec.frequency_shift_factor * w * (t - t0));
        } else if (seg->kind == TrigAnomalyKind::amplitude_shift) {
          v *= spec.amplitude_shift_factor;
        }
      }
      test(i, j) = v + spec.noise_sigma * rng.normal();
    }
    if (seg && seg->kind == TrigAnomalyKind::point_noise) {
      for (std::size_t j = 0; j < D; ++j) test(i, j) += spec.point_noise_scale * rng.normal();
    }
    labels[i] = seg ? 1 : 0;
  }

  return TrigData{LabeledSeries(std::move(train), Labels(spec.T_train, 0)), LabeledSeries(std::move(test), labels),
                  rate, std::move(shifted), std::move(amp)};
}

TrigSpec trig_preset(std::uint64_t seed) {
  TrigSpec spec;
  spec.seed = seed;
  spec.target_rate = 0.0234;

  constexpr std::size_t seg_len = 160;
  constexpr std::size_t n_points = 20;
  constexpr std::size_t margin = 100;  // keeps anomalies clear of the trimmed edges
  constexpr std::size_t gap = 10;

  Rng rng(seed ^ 0x5eed5eed5eedULL);
  const std::size_t seg_start = margin + rng.below(spec.T_test - 2 * margin - seg_len);
  spec.segments.push_back({seg_start, seg_start + seg_len, TrigAnomalyKind::frequency_shift});

  std::vector<std::size_t> taken;
  while (taken.size() < n_points) {
    const std::size_t t = margin + rng.below(spec.T_test - 2 * margin);
    if (t + gap >= seg_start && t < seg_start + seg_len + gap) continue;
    bool clash = false;
    for (auto u : taken) clash = clash || (t + gap > u && u + gap > t);
    if (clash) continue;
    taken.push_back(t);
    spec.segments.push_back({t, t + 1, TrigAnomalyKind::point_noise});
  }
  std::sort(spec.segments.begin(), spec.segments.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  return spec;
}

// -- JSON ---------------------------------------------------------------------------

nlohmann::json to_json(const ToySpec& spec) {
  return {{"kind", "toy"},         {"D", spec.D},
          {"alpha", spec.alpha},   {"n_normal", spec.n_normal},
          {"n_anomaly", spec.n_anomaly}, {"seed", spec.seed}};
}

nlohmann::json to_json(const SensorSpec& spec) {
  auto noise = nlohmann::json::array();
  for (const auto& n : spec.noise) noise.push_back({n.t, n.wx, n.wy});
  return {{"kind", "sensor"},   {"omega", spec.omega}, {"omega_slow", spec.omega_slow}, {"r", spec.r},
          {"r_min", spec.r_min}, {"r_max", spec.r_max}, {"T", spec.T},                   {"t1", spec.t1},
          {"t2", spec.t2},       {"noise", noise},     {"random_noise", spec.random_noise},
          {"noise_scale", spec.noise_scale}, {"seed", spec.seed}};
}

nlohmann::json to_json(const TrigSpec& spec) {
  auto segments = nlohmann::json::array();
  for (const auto& s : spec.segments) segments.push_back({{"start", s.start}, {"end", s.end}, {"kind", to_string(s.kind)}});
  nlohmann::json j = {{"kind", "trig"},
                      {"D", spec.D},
                      {"T_train", spec.T_train},
                      {"T_test", spec.T_test},
                      {"segments", segments},
                      {"base_frequencies", spec.base_frequencies},
                      {"amplitudes", spec.amplitudes},
                      {"phases", spec.phases},
                      {"noise_sigma", spec.noise_sigma},
                      {"shift_channel_fraction", spec.shift_channel_fraction},
                      {"frequency_shift_factor", spec.frequency_shift_factor},
                      {"amplitude_shift_factor", spec.amplitude_shift_factor},
                      {"point_noise_scale", spec.point_noise_scale},
                      {"seed", spec.seed}};
  if (spec.target_rate) j["target_rate"] = *spec.target_rate;
  return j;
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ToySpec toy_spec_from_json(const nlohmann::json& j) {
  ToySpec s;
  read(j, "D", s.D);
  read(j, "alpha", s.alpha);
  read(j, "n_normal", s.n_normal);
  read(j, "n_anomaly", s.n_anomaly);
  read(j, "seed", s.seed);
  return s;
}

SensorSpec sensor_spec_from_json(const nlohmann::json& j) {
  SensorSpec s;
  read(j, "omega", s.omega);
  read(j, "omega_slow", s.omega_slow);
  read(j, "r", s.r);
  read(j, "r_min", s.r_min);
  read(j, "r_max", s.r_max);
  read(j, "T", s.T);
  read(j, "t1", s.t1);
  read(j, "t2", s.t2);
  read(j, "random_noise", s.random_noise);
  read(j, "noise_scale", s.noise_scale);
  read(j, "seed", s.seed);
  if (j.contains("noise")) {
    for (const auto& n : j.at("noise")) {
      if (!n.is_array() || n.size() != 3) throw SpecError("noise points are [t, w_x, w_y] triples");
      s.noise.push_back({n[0].get<std::size_t>(), n[1].get<double>(), n[2].get<double>()});
    }
  }
  return s;
}

TrigSpec trig_spec_from_json(const nlohmann::json& j) {
  std::uint64_t seed = 0;
  read(j, "seed", seed);
  TrigSpec s = j.value("preset", false) ? trig_preset(seed) : TrigSpec{};
  s.seed = seed;
  read(j, "D", s.D);
  read(j, "T_train", s.T_train);
  read(j, "T_test", s.T_test);
  read(j, "base_frequencies", s.base_frequencies);
  read(j, "amplitudes", s.amplitudes);
  read(j, "phases", s.phases);
  read(j, "noise_sigma", s.noise_sigma);
  read(j, "shift_channel_fraction", s.shift_channel_fraction);
  read(j, "frequency_shift_factor", s.frequency_shift_factor);
  read(j, "amplitude_shift_factor", s.amplitude_shift_factor);
  read(j, "point_noise_scale", s.point_noise_scale);
  if (j.contains("target_rate")) {
    s.target_rate = j["target_rate"].is_null() ? std::nullopt : std::optional<double>(j["target_rate"].get<double>());
  }
  if (j.contains("segments")) {
    s.segments.clear();
    for (const auto& seg : j.at("segments")) {
      s.segments.push_back({seg.at("start").get<std::size_t>(), seg.at("end").get<std::size_t>(),
                            parse_trig_anomaly_kind(seg.at("kind").get<std::string>())});
    }
  }
  return s;
}

}  // namespace npsr
