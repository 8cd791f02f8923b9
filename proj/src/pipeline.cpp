#include "npsr/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "npsr/error.hpp"
#include "npsr/model_io.hpp"
#include "npsr/simd/kernels.hpp"
#include "npsr/synthetic.hpp"

namespace npsr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kPointFile = "point_model.txt";
constexpr const char* kSequenceFile = "sequence_model.txt";
constexpr const char* kMinMaxFile = "minmax.txt";

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string synthetic_kind(const json& spec) { return spec.value("kind", std::string("trig")); }

std::uint64_t synthetic_seed(const PipelineConfig& config) {
  if (!config.data.synthetic) return 0;
  return config.data.synthetic->value("seed", std::uint64_t{0});
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

Dataset load_dataset(const PipelineConfig& config) {
  if (config.data.train && config.data.test) {
    return {load_csv(*config.data.train, config.data.csv), load_csv(*config.data.test, config.data.csv)};
  }
  if (config.data.synthetic) {
    if (synthetic_kind(*config.data.synthetic) != "trig") {
      throw ConfigError("only the trig generator produces train/test splits for the pipeline");
    }
    TrigData d = gen_trig(trig_spec_from_json(*config.data.synthetic));
    return {std::move(d.train), std::move(d.test)};
  }
  throw ConfigError("data needs train and test paths or a synthetic spec");
}

PreparedData prepare(const Dataset& raw, const PreprocessSpec& spec) {
  return prepare(raw, spec, std::nullopt);
}

PreparedData prepare(const Dataset& raw, const PreprocessSpec& spec, const std::optional<MinMaxStats>& minmax) {
  LabeledSeries train = downsample(raw.train, spec.downsample_factor);
  LabeledSeries test = downsample(raw.test, spec.downsample_factor);
  if (!spec.normalize) return {{std::move(train), std::move(test)}, std::nullopt};
  MinMaxStats stats = minmax ? *minmax : minmax_fit(train);
  return {{minmax_apply(train, stats), minmax_apply(test, stats)}, std::move(stats)};
}

TrainedModels train_models(const PipelineConfig& config, const LabeledSeries& train) {
  return {train_point_model(train, config.point), train_sequence_model(train, config.sequence_hyper())};
}

SeriesScores score_series(const TrainedModels& models, const LabeledSeries& series) {
  const Matrix point_rec = reconstruct_points(models.point, series);
  const Matrix seq_rec = reconstruct_sequence(models.sequence, series);
  const ReconstructionPair pair = make_pair(point_rec, seq_rec, models.sequence.gamma);
  const Matrix observed = observed_in_range(series, pair);

  SeriesScores out{anomaly_score(pair, observed), nominality_score(pair, observed),
                   squared_error_score(pair.xstar_hat, observed, pair.valid_begin), pair.valid_begin, pair.valid_end};
  const std::size_t origin = series.time_origin() + pair.valid_begin;
  out.anomaly.time_origin = out.nominality.time_origin = out.sequence_error.time_origin = origin;
  return out;
}

ScoreBundle compute_scores(const PipelineConfig& config, const TrainedModels& models, const LabeledSeries& train,
                           const LabeledSeries& test) {
  ScoreBundle b;
  b.test = score_series(models, test);
  if (config.theta.value) {
    b.theta_n = resolve_theta(config.theta, {});
  } else {
    b.train_nominality = score_series(models, train).nominality.scores;
    b.theta_n = resolve_theta(config.theta, b.train_nominality);
  }
  b.induced = induced_anomaly_score(b.test.anomaly, b.test.nominality, config.gate_config(b.theta_n));
  if (test.has_labels()) b.labels = align_labels(test, b.test.anomaly);
  return b;
}

Labels align_labels(const LabeledSeries& series, const ScoreSeries& scores) {
  const Labels& labels = series.require_labels();
  if (scores.time_origin < series.time_origin() ||
      scores.time_origin - series.time_origin() + scores.size() > series.length()) {
    throw ShapeError("scores cover time indices outside the labeled series");
  }
  const auto begin = labels.begin() + static_cast<std::ptrdiff_t>(scores.time_origin - series.time_origin());
  return Labels(begin, begin + static_cast<std::ptrdiff_t>(scores.size()));
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  const PreparedData prepared = prepare(load_dataset(config), config.preprocess);
  TrainedModels models = train_models(config, prepared.data.train);
  ScoreBundle scores = compute_scores(config, models, prepared.data.train, prepared.data.test);
  if (!scores.labels) throw LabelError("test split has no labels");
  EvalReport report = evaluate(scores.induced, *scores.labels, config.evaluation);
  return {std::move(models), std::move(scores), std::move(report)};
}

// -- sweep --------------------------------------------------------------------

SweepResult sweep(const ScoreBundle& bundle, const std::vector<std::size_t>& ds) {
  if (!bundle.labels) throw LabelError("sweep needs test labels");
  if (ds.empty()) throw ConfigError("sweep needs at least one d");
  const Labels& y = *bundle.labels;
  const std::vector<std::string> methods{"point", "sequence", "hard_theta_inf", "hard_theta_N", "soft_theta_N"};

  // One slot per (d, method); each thread owns one d.
  std::vector<SweepCell> cells(ds.size() * methods.size());
  auto run = [&](std::size_t di) {
    const std::size_t d = ds[di];
    const ScoreSeries candidates[] = {
        bundle.test.anomaly,
        bundle.test.sequence_error,
        induced_anomaly_score(bundle.test.anomaly, bundle.test.nominality,
                              {GateKind::hard, std::numeric_limits<double>::max(), d}),
        induced_anomaly_score(bundle.test.anomaly, bundle.test.nominality, {GateKind::hard, bundle.theta_n, d}),
        induced_anomaly_score(bundle.test.anomaly, bundle.test.nominality, {GateKind::soft, bundle.theta_n, d}),
    };
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const EvalReport r = best_f1(candidates[m], y);
      cells[di * methods.size() + m] = {methods[m], d, r.auc, r.best_f1};
    }
  };
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t di = 0; di < ds.size(); ++di) {
    workers.emplace_back([&, di] {
      try {
        run(di);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<double> aucs, f1s;
    for (std::size_t di = 0; di < ds.size(); ++di) {
      const auto& cell = cells[di * methods.size() + m];
      result.cells.push_back(cell);
      aucs.push_back(cell.auc);
      f1s.push_back(cell.f1);
    }
    result.summary.push_back({methods[m], mean(aucs), population_sd(aucs), mean(f1s), population_sd(f1s)});
  }
  return result;
}

json to_json(const SweepResult& result) {
  json cells = json::array();
  for (const auto& c : result.cells) cells.push_back({{"method", c.method}, {"d", c.d}, {"auc", c.auc}, {"f1", c.f1}});
  json summary = json::array();
  for (const auto& s : result.summary) {
    summary.push_back({{"method", s.method},
                       {"auc_mean", s.auc_mean},
                       {"auc_sd", s.auc_sd},
                       {"f1_mean", s.f1_mean},
                       {"f1_sd", s.f1_sd}});
  }
  return {{"cells", cells}, {"summary", summary}};
}

void write_sweep_csv(const SweepResult& result, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "method,d,auc,f1\n";
  for (const auto& c : result.cells) out << c.method << ',' << c.d << ',' << c.auc << ',' << c.f1 << '\n';
  for (const auto& s : result.summary) {
    out << s.method << ",mean," << s.auc_mean << ',' << s.f1_mean << '\n';
    out << s.method << ",sd," << s.auc_sd << ',' << s.f1_sd << '\n';
  }
}

// -- commands -----------------------------------------------------------------

json manifest(const PipelineConfig& config, const std::string& command) {
  return {{"command", command},
          {"version", kVersion},
          {"config_hash", config_hash(config)},
          {"config", to_json(config)},
          {"seeds", {{"training", config.point.seed}, {"synthetic", synthetic_seed(config)}}},
          {"simd", simd::isa_name(simd::active_isa())}};
}

void cmd_synth(const PipelineConfig& config, std::ostream& log) {
  if (!config.data.synthetic) throw ConfigError("synth needs a data.synthetic section");
  const json& spec_json = *config.data.synthetic;
  const std::string kind = synthetic_kind(spec_json);
  ensure_dir(config.output_dir);
  json sidecar;
  json m = manifest(config, "synth");

  if (kind == "trig") {
    const TrigSpec spec = trig_spec_from_json(spec_json);
    const TrigData data = gen_trig(spec);
    write_csv(data.train, config.output_dir / "train.csv");
    write_csv(data.test, config.output_dir / "test.csv");
    sidecar = {{"spec", to_json(spec)}, {"anomaly_rate", data.anomaly_rate}, {"shifted_channels", data.shifted_channels}};
    m["outputs"] = {"train.csv", "test.csv", "synth.json"};
    log << "trig: train " << data.train.length() << " rows, test " << data.test.length() << " rows, anomaly rate "
        << data.anomaly_rate << '\n';
  } else if (kind == "toy") {
    const ToySpec spec = toy_spec_from_json(spec_json);
    std::ofstream out(config.output_dir / "toy.csv");
    if (!out) throw IoError("cannot write " + (config.output_dir / "toy.csv").string());
    out.precision(17);
    for (std::size_t k = 0; k < spec.D; ++k) out << "dxc_" << k << ',';
    for (std::size_t k = 0; k < spec.D; ++k) out << "dxp_" << k << ',';
    out << "label,N\n";
    gen_toy_visit(spec, [&](const ToySample& s) {
      for (double v : s.dxc) out << v << ',';
      for (double v : s.dxp) out << v << ',';
      out << s.label << ',' << s.nominality << '\n';
    });
    sidecar = {{"spec", to_json(spec)}};
    m["outputs"] = {"toy.csv", "synth.json"};
    log << "toy: " << spec.n_normal << " normal, " << spec.n_anomaly << " anomalous samples\n";
  } else if (kind == "sensor") {
    const SensorSpec spec = sensor_spec_from_json(spec_json);
    const SensorData data = gen_sensor(spec);
    write_csv(data.series, config.output_dir / "sensor.csv");
    json tags = json::array();
    for (auto t : data.tags) tags.push_back(to_string(t));
    sidecar = {{"spec", to_json(spec)}, {"tags", tags}};
    m["outputs"] = {"sensor.csv", "synth.json"};
    log << "sensor: " << spec.T << " rows\n";
  } else {
    throw SpecError("unknown synthetic kind '" + kind + "'");
  }
  write_json(sidecar, config.output_dir / "synth.json");
  write_json(m, config.output_dir / "synth_manifest.json");
}

void cmd_train(const PipelineConfig& config, std::ostream& log) {
  const PreparedData prepared = prepare(load_dataset(config), config.preprocess);
  const TrainedModels models = train_models(config, prepared.data.train);
  ensure_dir(config.output_dir);
  save_point_model(models.point, config.output_dir / kPointFile);
  save_sequence_model(models.sequence, config.output_dir / kSequenceFile);
  json m = manifest(config, "train");
  json outputs = {kPointFile, kSequenceFile};
  if (prepared.minmax) {
    save_minmax(*prepared.minmax, config.output_dir / kMinMaxFile);
    outputs.push_back(kMinMaxFile);
  }
  const auto& losses = models.point.epoch_losses;
  if (!losses.empty()) {
    m["point_loss_first"] = losses.front();
    m["point_loss_final"] = losses.back();
    log << "point model: loss " << losses.front() << " -> " << losses.back() << " over " << losses.size()
        << " epochs\n";
  } else {
    log << "point model: saved at initialization (0 epochs)\n";
  }
  log << "sequence model: " << models.sequence.feature_count() << " features -> " << models.sequence.target_count()
      << " targets\n";
  m["outputs"] = outputs;
  write_json(m, config.output_dir / "train_manifest.json");
}

namespace {

TrainedModels load_models(const fs::path& dir) {
  return {load_point_model(dir / kPointFile), load_sequence_model(dir / kSequenceFile)};
}

std::optional<MinMaxStats> load_saved_minmax(const PipelineConfig& config) {
  if (!config.preprocess.normalize) return std::nullopt;
  return load_minmax(config.output_dir / kMinMaxFile);
}

}  // namespace

void cmd_score(const PipelineConfig& config, std::ostream& log) {
  const TrainedModels models = load_models(config.output_dir);
  if (models.sequence.gamma != config.gamma()) {
    throw ConfigError("saved sequence model has gamma " + std::to_string(models.sequence.gamma) +
                      " but W0 gives " + std::to_string(config.gamma()));
  }
  const PreparedData prepared = prepare(load_dataset(config), config.preprocess, load_saved_minmax(config));
  const ScoreBundle b = compute_scores(config, models, prepared.data.train, prepared.data.test);
  write_scores_csv(b.test.anomaly, config.output_dir / "anomaly.csv");
  write_scores_csv(b.test.nominality, config.output_dir / "nominality.csv");
  write_scores_csv(b.induced, config.output_dir / "induced.csv");
  json m = manifest(config, "score");
  m["theta_N"] = b.theta_n;
  m["theta_source"] = config.theta.value ? "explicit" : "percentile";
  m["time_origin"] = b.induced.time_origin;
  m["rows"] = b.induced.size();
  m["outputs"] = {"anomaly.csv", "nominality.csv", "induced.csv"};
  write_json(m, config.output_dir / "score_manifest.json");
  log << "scored " << b.induced.size() << " rows from time index " << b.induced.time_origin << ", theta_N "
      << b.theta_n << '\n';
}

void cmd_eval(const PipelineConfig& config, const std::optional<fs::path>& scores_path, std::ostream& log) {
  const fs::path path = scores_path ? *scores_path : config.output_dir / "induced.csv";
  const ScoreSeries scores = load_scores_csv(path, ScoreKind::induced);
  const Dataset raw = load_dataset(config);
  const LabeledSeries test = downsample(raw.test, config.preprocess.downsample_factor);
  const Labels labels = align_labels(test, scores);
  const EvalReport report = evaluate(scores, labels, config.evaluation);
  ensure_dir(config.output_dir);
  write_report_json(report, config.output_dir / "report.json");
  write_curve_csv(report, config.output_dir / "curve.csv");
  json m = manifest(config, "eval");
  m["scores"] = path.string();
  m["outputs"] = {"report.json", "curve.csv"};
  write_json(m, config.output_dir / "eval_manifest.json");
  log << "best F1 " << report.best_f1 << " at threshold " << report.best_threshold << ", AUC " << report.auc;
  if (report.pa_best_f1) log << ", PA best F1 " << *report.pa_best_f1;
  if (report.spiked_pa_best_f1) log << ", spiked PA best F1 " << *report.spiked_pa_best_f1;
  log << '\n';
}

void cmd_sweep(const PipelineConfig& config, std::ostream& log) {
  const TrainedModels models = load_models(config.output_dir);
  const PreparedData prepared = prepare(load_dataset(config), config.preprocess, load_saved_minmax(config));
  const ScoreBundle b = compute_scores(config, models, prepared.data.train, prepared.data.test);
  const SweepResult result = sweep(b);
  write_sweep_csv(result, config.output_dir / "sweep.csv");
  write_json(to_json(result), config.output_dir / "sweep.json");
  json m = manifest(config, "sweep");
  m["theta_N"] = b.theta_n;
  m["outputs"] = {"sweep.csv", "sweep.json"};
  write_json(m, config.output_dir / "sweep_manifest.json");
  for (const auto& s : result.summary) {
    log << s.method << ": AUC " << s.auc_mean << " (sd " << s.auc_sd << "), F1* " << s.f1_mean << " (sd "
        << s.f1_sd << ")\n";
  }
}

}  // namespace npsr
