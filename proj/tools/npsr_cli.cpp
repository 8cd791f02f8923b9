// npsr: synth | train | score | eval | sweep | run
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "npsr/config.hpp"
#include "npsr/error.hpp"
#include "npsr/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

struct Overrides {
  std::string config;
  std::optional<std::size_t> d;
  std::optional<std::string> gate;
  std::optional<double> theta_percentile;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--d", o.d, "induction length");
  cmd->add_option("--gate", o.gate, "gate function")->check(CLI::IsMember({"soft", "hard"}));
  cmd->add_option("--theta-percentile", o.theta_percentile, "theta_N as a percentile of training nominality");
  cmd->add_option("--seed", o.seed, "training and generator seed");
  cmd->add_option("--out", o.out, "output directory");
}

npsr::PipelineConfig resolve(const Overrides& o) {
  npsr::PipelineConfig c = o.config.empty() ? npsr::config_from_json(nlohmann::json::object())
                                            : npsr::load_config(o.config);
  if (o.d) c.d = *o.d;
  if (o.gate) c.gate = npsr::parse_gate_kind(*o.gate);
  if (o.theta_percentile) {
    if (!(*o.theta_percentile > 0.0 && *o.theta_percentile <= 100.0)) {
      throw npsr::ConfigError("--theta-percentile must be in (0, 100]");
    }
    c.theta = npsr::ThetaSource::from_percentile(*o.theta_percentile);
  }
  if (o.seed) {
    c.point.seed = *o.seed;
    if (c.data.synthetic) (*c.data.synthetic)["seed"] = *o.seed;
  }
  if (o.out) c.output_dir = *o.out;
  return c;
}

int exit_code(npsr::ErrorClass cls) {
  switch (cls) {
    case npsr::ErrorClass::usage: return kUsage;
    case npsr::ErrorClass::data: return kData;
    case npsr::ErrorClass::numeric: return kNumeric;
  }
  return kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nominality-score anomaly detection pipeline"};
  app.require_subcommand(1);

  Overrides o;
  std::optional<std::string> scores_path;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  auto* train = app.add_subcommand("train", "train the point and sequence models");
  auto* score = app.add_subcommand("score", "write anomaly, nominality and induced scores");
  auto* eval = app.add_subcommand("eval", "evaluate a score file against test labels");
  auto* sweep = app.add_subcommand("sweep", "method x d ablation table");
  auto* run = app.add_subcommand("run", "train, score and eval in sequence");
  for (auto* cmd : {synth, train, score, eval, sweep, run}) add_common(cmd, o);
  eval->add_option("--scores", scores_path, "score CSV (default <out>/induced.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const npsr::PipelineConfig config = resolve(o);
    const std::optional<std::filesystem::path> scores =
        scores_path ? std::optional<std::filesystem::path>(*scores_path) : std::nullopt;
    if (*synth) npsr::cmd_synth(config, std::cout);
    if (*train || *run) npsr::cmd_train(config, std::cout);
    if (*score || *run) npsr::cmd_score(config, std::cout);
    if (*eval || *run) npsr::cmd_eval(config, scores, std::cout);
    if (*sweep) npsr::cmd_sweep(config, std::cout);
  } catch (const npsr::Error& e) {
    std::cerr << "npsr: " << e.what() << '\n';
    return exit_code(e.error_class());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "npsr: config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "npsr: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
