#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "npsr/config.hpp"
#include "npsr/error.hpp"
#include "npsr/pipeline.hpp"
#include "npsr/synthetic.hpp"

using namespace npsr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("npsr_pipeline_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NPSR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small labeled trig splits written as CSV, plus a config pointing at them.
json small_config(const fs::path& dir, std::size_t t_test = 300) {
  TrigSpec spec;
  spec.D = 4;
  spec.T_train = 400;
  spec.T_test = t_test;
  spec.shift_channel_fraction = 0.5;
  if (t_test >= 200) spec.segments = {{100, 140, TrigAnomalyKind::frequency_shift}, {200, 201, TrigAnomalyKind::point_noise}};
  else spec.segments = {{4, 6, TrigAnomalyKind::amplitude_shift}};
  spec.seed = 9;
  const TrigData d = gen_trig(spec);
  write_csv(d.train, dir / "train.csv");
  write_csv(d.test, dir / "test.csv");
  return {{"data", {{"train", "train.csv"}, {"test", "test.csv"}, {"label_column", "label"}}},
          {"preprocess", {{"stride", 5}, {"W", 10}, {"W0", 10}}},
          {"model", {{"D_lat", 2}}},
          {"training", {{"learn_rate", 0.01}, {"optimizer", "adam"}, {"batch_size", 32}, {"training_epochs", 3}, {"seed", 1}}},
          {"sequence", {{"delta", 2}, {"ridge_lambda", 0.1}}},
          {"induced", {{"gate_function", "soft"}, {"d", 4}, {"theta_N_ratio", 95.0}}},
          {"evaluation", {{"point_adjust", true}, {"spike_interval", 50}}},
          {"output_dir", "out"}};
}

fs::path save_config(const fs::path& dir, const json& j, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  write_file(p, j.dump(2));
  return p;
}

}  // namespace

// -- config ---------------------------------------------------------------------------

TEST_CASE("config defaults and parsing") {
  const PipelineConfig c = config_from_json(json::object());
  CHECK(c.w0 == 50);
  CHECK(c.gamma() == 25);
  CHECK(c.gate == GateKind::soft);
  CHECK(c.d == 16);
  CHECK(c.theta.percentile == 99.85);
  CHECK_FALSE(c.evaluation.point_adjust);
  CHECK_FALSE(c.evaluation.spike_interval);

  const PipelineConfig t = load_config(fs::path(NPSR_CONFIG_DIR) / "trimsyn.json");
  CHECK(t.point.latent_dim == 4);
  CHECK(t.sequence.gamma == 25);
  CHECK(t.sequence.stride == 10);
  CHECK(t.theta.percentile == 98.5);
  CHECK(t.output_dir.is_absolute());

  const json explicit_theta = {{"induced", {{"theta_N", 0.5}, {"gate_function", "hard"}}}};
  const PipelineConfig e = config_from_json(explicit_theta);
  CHECK(e.theta.value == 0.5);
  CHECK(e.gate == GateKind::hard);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config_from_json({{"modle", json::object()}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"model", {{"D_lat", 2}, {"depth", 3}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"preprocess", {{"W0", 7}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"induced", {{"gate_function", "sigmoid"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"induced", {{"theta_N_ratio", 0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"induced", {{"theta_N", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"training", {{"optimizer", "rmsprop"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"training", {{"batch_size", "many"}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"sequence", {{"delta", 60}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"evaluation", {{"spike_interval", 0}}}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("canonical config round trips and hashes stably") {
  const PipelineConfig c = load_config(fs::path(NPSR_CONFIG_DIR) / "trimsyn.json");
  const PipelineConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  PipelineConfig moved = c;
  moved.output_dir = "/elsewhere";
  CHECK(config_hash(moved) == config_hash(c));
  PipelineConfig changed = c;
  changed.d = 3;
  CHECK(config_hash(changed) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
}

// -- in-process pipeline --------------------------------------------------------------

TEST_CASE("score alignment over the valid range") {
  TempDir tmp;
  json j = small_config(tmp.path(), 10);
  j["preprocess"]["W0"] = 4;
  j["preprocess"]["W"] = 4;
  j["sequence"]["delta"] = 2;
  const PipelineConfig c = config_from_json(j, tmp.path());
  const PipelineResult r = run_pipeline(c);
  CHECK(r.scores.induced.size() == 6);
  CHECK(r.scores.induced.time_origin == 2);
  CHECK(r.scores.test.valid_begin == 2);
  CHECK(r.scores.test.valid_end == 8);
  const Dataset raw = load_dataset(c);
  const Labels expect(raw.test.labels()->begin() + 2, raw.test.labels()->begin() + 8);
  CHECK(*r.scores.labels == expect);
}

TEST_CASE("d = 0 leaves the anomaly score unchanged") {
  TempDir tmp;
  json j = small_config(tmp.path());
  j["induced"]["d"] = 0;
  const PipelineResult r = run_pipeline(config_from_json(j, tmp.path()));
  CHECK(r.scores.induced.scores == r.scores.test.anomaly.scores);
}

TEST_CASE("sweep properties") {
  TempDir tmp;
  const PipelineConfig c = config_from_json(small_config(tmp.path()), tmp.path());
  const PipelineResult r = run_pipeline(c);
  const std::vector<std::size_t> ds{1, 2, 4, 8};
  const SweepResult s = sweep(r.scores, ds);
  REQUIRE(s.cells.size() == 20);
  REQUIRE(s.summary.size() == 5);
  // Methods that ignore d give the same row for every d, hence zero spread.
  for (const auto& sum : s.summary) {
    if (sum.method == "point" || sum.method == "sequence") {
      CHECK(sum.auc_sd == 0.0);
      CHECK(sum.f1_sd == 0.0);
    }
  }
  for (const auto& cell : s.cells) {
    if (cell.method != "hard_theta_inf") continue;
    const ScoreSeries smooth = smoothed_score(r.scores.test.anomaly, cell.d);
    const EvalReport e = best_f1(smooth, *r.scores.labels);
    CHECK(cell.f1 == e.best_f1);
    CHECK(cell.auc == e.auc);
  }
  const json sj = to_json(s);
  CHECK(sj["cells"].size() == 20);
  CHECK(sj["summary"][0].contains("f1_sd"));

  ScoreBundle unlabeled = r.scores;
  unlabeled.labels.reset();
  CHECK_THROWS_AS(sweep(unlabeled, ds), LabelError);
  CHECK_THROWS_AS(sweep(r.scores, {}), ConfigError);
}

TEST_CASE("explicit theta bypasses the training percentile") {
  TempDir tmp;
  json j = small_config(tmp.path());
  j["induced"]["theta_N"] = 0.25;
  const PipelineResult r = run_pipeline(config_from_json(j, tmp.path()));
  CHECK(r.scores.theta_n == 0.25);
  CHECK(r.scores.train_nominality.empty());
}

TEST_CASE("synthetic trig data source") {
  const json j = {{"data", {{"synthetic", {{"kind", "trig"}, {"preset", true}, {"seed", 2}}}}}};
  const Dataset d = load_dataset(config_from_json(j));
  CHECK(d.train.length() == 10000);
  CHECK(d.test.length() == 7680);
  const json toy = {{"data", {{"synthetic", {{"kind", "toy"}}}}}};
  CHECK_THROWS_AS(load_dataset(config_from_json(toy)), ConfigError);
  CHECK_THROWS_AS(load_dataset(config_from_json(json::object())), ConfigError);
}

// -- CLI ------------------------------------------------------------------------------

TEST_CASE("CLI exit codes") {
  TempDir tmp;
  const fs::path cfg = save_config(tmp.path(), small_config(tmp.path()));

  json missing = small_config(tmp.path());
  missing["data"]["train"] = "absent.csv";
  CHECK(run_cli("train --config " + save_config(tmp.path(), missing, "missing.json").string()) == 3);

  write_file(tmp.path() / "bad.json", "{\"induced\": {\"gate_function\": \"sigmoid\"}}");
  CHECK(run_cli("train --config " + (tmp.path() / "bad.json").string()) == 2);
  write_file(tmp.path() / "broken.json", "{ not json");
  CHECK(run_cli("train --config " + (tmp.path() / "broken.json").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("train --config " + cfg.string() + " --gate sigmoid") == 2);

  const json bad_segment = {{"data", {{"synthetic", {{"kind", "trig"}, {"T_train", 100}, {"T_test", 50},
                                                     {"segments", json::array({{{"start", 40}, {"end", 60}, {"kind", "point-noise"}}})}}}}},
                            {"output_dir", "synth_out"}};
  CHECK(run_cli("synth --config " + save_config(tmp.path(), bad_segment, "segment.json").string()) == 3);

  json diverge = small_config(tmp.path());
  diverge["training"]["learn_rate"] = 1e10;
  diverge["training"]["optimizer"] = "sgd";
  CHECK(run_cli("train --config " + save_config(tmp.path(), diverge, "diverge.json").string()) == 4);

  CHECK(run_cli("score --config " + cfg.string()) == 3);  // no trained models yet
  CHECK(run_cli("run --config " + cfg.string()) == 0);
}

TEST_CASE("CLI run writes outputs and manifests") {
  TempDir tmp;
  const fs::path cfg = save_config(tmp.path(), small_config(tmp.path()));
  REQUIRE(run_cli("run --config " + cfg.string()) == 0);
  const fs::path out = tmp.path() / "out";
  for (const char* f : {"point_model.txt", "sequence_model.txt", "minmax.txt", "anomaly.csv", "nominality.csv",
                        "induced.csv", "report.json", "curve.csv", "train_manifest.json", "score_manifest.json",
                        "eval_manifest.json"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  const json sm = read_json(out / "score_manifest.json");
  CHECK(sm.contains("theta_N"));
  CHECK(sm["theta_source"] == "percentile");
  CHECK(sm["time_origin"] == 5);
  CHECK(sm["rows"] == 290);
  CHECK(sm["version"] == kVersion);
  CHECK(sm["seeds"]["training"] == 1);
  const json report = read_json(out / "report.json");
  CHECK(report.contains("pa_best_f1"));
  CHECK(report.contains("spiked_pa_best_f1"));
  CHECK(report.contains("auc"));
  CHECK(slurp(out / "curve.csv").rfind("threshold,precision,recall,f1\n", 0) == 0);

  // score + eval from files agrees with the in-process pipeline
  const PipelineResult r = run_pipeline(load_config(cfg));
  CHECK(report["best_f1"].get<double>() == r.report.best_f1);
  CHECK(report["auc"].get<double>() == r.report.auc);
  CHECK(sm["theta_N"].get<double>() == r.scores.theta_n);
  const ScoreSeries induced = load_scores_csv(out / "induced.csv", ScoreKind::induced);
  CHECK(induced.scores == r.scores.induced.scores);
}

TEST_CASE("CLI reruns are byte-identical") {
  TempDir tmp;
  const fs::path cfg = save_config(tmp.path(), small_config(tmp.path()));
  REQUIRE(run_cli("run --config " + cfg.string() + " --out " + (tmp.path() / "a").string()) == 0);
  REQUIRE(run_cli("run --config " + cfg.string() + " --out " + (tmp.path() / "b").string()) == 0);
  for (const char* f : {"point_model.txt", "sequence_model.txt", "anomaly.csv", "induced.csv", "report.json"}) {
    CHECK_MESSAGE(slurp(tmp.path() / "a" / f) == slurp(tmp.path() / "b" / f), f);
  }
}

TEST_CASE("CLI overrides and eval options") {
  TempDir tmp;
  json j = small_config(tmp.path());
  j["evaluation"] = {{"point_adjust", false}};
  const fs::path cfg = save_config(tmp.path(), j);
  REQUIRE(run_cli("run --config " + cfg.string() + " --d 0") == 0);
  const fs::path out = tmp.path() / "out";
  CHECK(slurp(out / "induced.csv") == slurp(out / "anomaly.csv"));
  const json report = read_json(out / "report.json");
  CHECK_FALSE(report.contains("pa_best_f1"));
  CHECK_FALSE(report.contains("spiked_pa_best_f1"));
  CHECK(read_json(out / "score_manifest.json")["config"]["induced"]["d"] == 0);

  REQUIRE(run_cli("eval --config " + cfg.string() + " --scores " + (out / "nominality.csv").string()) == 0);
  CHECK(read_json(out / "eval_manifest.json")["scores"] == (out / "nominality.csv").string());

  REQUIRE(run_cli("score --config " + cfg.string() + " --gate hard --theta-percentile 50") == 0);
  const json sm = read_json(out / "score_manifest.json");
  CHECK(sm["config"]["induced"]["gate_function"] == "hard");
  CHECK(sm["config"]["induced"]["theta_N_ratio"] == 50.0);
  CHECK(run_cli("score --config " + cfg.string() + " --theta-percentile 0") == 2);

  REQUIRE(run_cli("sweep --config " + cfg.string()) == 0);
  const json sw = read_json(out / "sweep.json");
  CHECK(sw["cells"].size() == kSweepDs.size() * 5);

  // A model trained with one W0 cannot score with another.
  json other = j;
  other["preprocess"]["W0"] = 12;
  CHECK(run_cli("score --config " + save_config(tmp.path(), other, "other.json").string()) == 2);
}

TEST_CASE("CLI synth writes each generator") {
  TempDir tmp;
  const json toy = {{"data", {{"synthetic", {{"kind", "toy"}, {"D", 3}, {"n_normal", 20}, {"n_anomaly", 10}}}}},
                    {"output_dir", "toy"}};
  REQUIRE(run_cli("synth --config " + save_config(tmp.path(), toy, "toy.json").string()) == 0);
  const std::string csv = slurp(tmp.path() / "toy" / "toy.csv");
  CHECK(csv.rfind("dxc_0,dxc_1,dxc_2,dxp_0,dxp_1,dxp_2,label,N\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);

  const json sensor = {{"data", {{"synthetic", {{"kind", "sensor"}, {"T", 50}, {"noise", json::array({json::array({10, 1.0, 1.0})})}}}}},
                       {"output_dir", "sensor"}};
  REQUIRE(run_cli("synth --config " + save_config(tmp.path(), sensor, "sensor.json").string()) == 0);
  CHECK(read_json(tmp.path() / "sensor" / "synth.json")["tags"][9] == "point");

  const json trig = {{"data", {{"synthetic", {{"kind", "trig"}, {"preset", true}}}}}, {"output_dir", "trig"}};
  const fs::path trig_cfg = save_config(tmp.path(), trig, "trig.json");
  REQUIRE(run_cli("synth --config " + trig_cfg.string() + " --seed 3") == 0);
  const json sidecar = read_json(tmp.path() / "trig" / "synth.json");
  CHECK(std::abs(sidecar["anomaly_rate"].get<double>() - 0.0234) <= 0.0005);
  CHECK(read_json(tmp.path() / "trig" / "synth_manifest.json")["seeds"]["synthetic"] == 3);
  const LabeledSeries test = load_csv(tmp.path() / "trig" / "test.csv", CsvOptions{true, "label"});
  CHECK(test.values() == gen_trig(trig_preset(3)).test.values());
}
