#include "npsr/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "npsr/error.hpp"

namespace npsr {

namespace {

using nlohmann::json;

void check_keys(const json& section, const char* name, const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in '" + name + "'");
  }
}

template <typename T>
void read(const json& section, const char* key, T& out) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

const json& section_or_empty(const json& j, const char* name) {
  static const json empty = json::object();
  return j.contains(name) ? j.at(name) : empty;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return (path.is_relative() && !base.empty()) ? base / path : path;
}

}  // namespace

SequenceHyperparams PipelineConfig::sequence_hyper() const {
  SequenceHyperparams hp = sequence;
  hp.gamma = gamma();
  hp.stride = preprocess.stride;
  return hp;
}

PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(j, "config",
             {"data", "preprocess", "model", "training", "sequence", "induced", "evaluation", "output_dir"});
  PipelineConfig c;

  const json& data = section_or_empty(j, "data");
  check_keys(data, "data", {"train", "test", "label_column", "has_header", "synthetic"});
  if (data.contains("train")) c.data.train = resolve(base_dir, data["train"].get<std::string>());
  if (data.contains("test")) c.data.test = resolve(base_dir, data["test"].get<std::string>());
  if (data.contains("label_column") && !data["label_column"].is_null()) {
    const auto& lc = data["label_column"];
    c.data.csv.label_column = lc.is_number_unsigned() ? std::to_string(lc.get<std::size_t>()) : lc.get<std::string>();
  }
  read(data, "has_header", c.data.csv.has_header);
  if (data.contains("synthetic")) c.data.synthetic = data["synthetic"];

  const json& pre = section_or_empty(j, "preprocess");
  check_keys(pre, "preprocess", {"downsample", "normalization", "stride", "W", "W0"});
  read(pre, "downsample", c.preprocess.downsample_factor);
  std::string norm = "minmax";
  read(pre, "normalization", norm);
  if (norm != "minmax" && norm != "none") throw ConfigError("normalization must be 'minmax' or 'none'");
  c.preprocess.normalize = norm == "minmax";
  read(pre, "stride", c.preprocess.stride);
  read(pre, "W", c.preprocess.window_len);
  read(pre, "W0", c.w0);
  if (c.preprocess.downsample_factor < 1) throw ConfigError("downsample must be >= 1");
  if (c.preprocess.stride < 1) throw ConfigError("stride must be >= 1");
  if (c.w0 < 2 || c.w0 % 2 != 0) throw ConfigError("W0 must be a positive even number (W0 = 2 gamma)");

  const json& model = section_or_empty(j, "model");
  check_keys(model, "model", {"D_lat", "num_heads", "ff_mult", "N_perf", "N_enc"});
  read(model, "D_lat", c.point.latent_dim);

  const json& train = section_or_empty(j, "training");
  check_keys(train, "training", {"learn_rate", "optimizer", "batch_size", "training_epochs", "seed"});
  read(train, "learn_rate", c.point.learn_rate);
  std::string opt = to_string(c.point.optimizer);
  read(train, "optimizer", opt);
  c.point.optimizer = parse_optimizer(opt);
  read(train, "batch_size", c.point.batch_size);
  read(train, "training_epochs", c.point.epochs);
  read(train, "seed", c.point.seed);
  if (!(c.point.learn_rate > 0.0)) throw ConfigError("learn_rate must be > 0");
  if (c.point.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (c.point.latent_dim < 1) throw ConfigError("D_lat must be >= 1");

  const json& seq = section_or_empty(j, "sequence");
  check_keys(seq, "sequence", {"delta", "ridge_lambda"});
  read(seq, "delta", c.sequence.delta);
  read(seq, "ridge_lambda", c.sequence.ridge_lambda);
  c.sequence = c.sequence_hyper();
  if (c.sequence.delta < 1 || c.sequence.delta > 2 * c.gamma()) throw ConfigError("delta must be in [1, W0]");
  if (!(c.sequence.ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be >= 0");

  const json& ind = section_or_empty(j, "induced");
  check_keys(ind, "induced", {"gate_function", "d", "theta_N_ratio", "theta_N"});
  std::string gate = to_string(c.gate);
  read(ind, "gate_function", gate);
  c.gate = parse_gate_kind(gate);
  read(ind, "d", c.d);
  if (ind.contains("theta_N") && !ind["theta_N"].is_null()) {
    double v = 0.0;
    read(ind, "theta_N", v);
    if (!(v > 0.0)) throw ConfigError("theta_N must be > 0");
    c.theta = ThetaSource::explicit_value(v);
  } else if (ind.contains("theta_N_ratio")) {
    double p = 0.0;
    read(ind, "theta_N_ratio", p);
    if (!(p > 0.0 && p <= 100.0)) throw ConfigError("theta_N_ratio must be in (0, 100]");
    c.theta = ThetaSource::from_percentile(p);
  }

  const json& ev = section_or_empty(j, "evaluation");
  check_keys(ev, "evaluation", {"point_adjust", "spike_interval"});
  read(ev, "point_adjust", c.evaluation.point_adjust);
  if (ev.contains("spike_interval") && !ev["spike_interval"].is_null()) {
    std::size_t s = 0;
    read(ev, "spike_interval", s);
    if (s < 1) throw ConfigError("spike_interval must be >= 1");
    c.evaluation.spike_interval = s;
  }

  if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  json data = json::object();
  if (c.data.train) data["train"] = c.data.train->string();
  if (c.data.test) data["test"] = c.data.test->string();
  data["has_header"] = c.data.csv.has_header;
  data["label_column"] = c.data.csv.label_column ? json(*c.data.csv.label_column) : json(nullptr);
  if (c.data.synthetic) data["synthetic"] = *c.data.synthetic;

  json induced = {{"gate_function", to_string(c.gate)}, {"d", c.d}};
  induced["theta_N"] = c.theta.value ? json(*c.theta.value) : json(nullptr);
  induced["theta_N_ratio"] = c.theta.percentile ? json(*c.theta.percentile) : json(nullptr);

  json evaluation = {{"point_adjust", c.evaluation.point_adjust}};
  evaluation["spike_interval"] = c.evaluation.spike_interval ? json(*c.evaluation.spike_interval) : json(nullptr);

  return {{"data", data},
          {"preprocess",
           {{"downsample", c.preprocess.downsample_factor},
            {"normalization", c.preprocess.normalize ? "minmax" : "none"},
            {"stride", c.preprocess.stride},
            {"W", c.preprocess.window_len},
            {"W0", c.w0}}},
          {"model", {{"D_lat", c.point.latent_dim}}},
          {"training",
           {{"learn_rate", c.point.learn_rate},
            {"optimizer", to_string(c.point.optimizer)},
            {"batch_size", c.point.batch_size},
            {"training_epochs", c.point.epochs},
            {"seed", c.point.seed}}},
          {"sequence", {{"delta", c.sequence.delta}, {"ridge_lambda", c.sequence.ridge_lambda}}},
          {"induced", induced},
          {"evaluation", evaluation},
          {"output_dir", c.output_dir.string()}};
}

std::string config_hash(const PipelineConfig& config) {
  // Where results land does not change them.
  auto canonical = to_json(config);
  canonical.erase("output_dir");
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace npsr
