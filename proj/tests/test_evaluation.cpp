#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "npsr/error.hpp"
#include "npsr/evaluation.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace npsr;
using namespace npsr::testing;

TEST_CASE("confusion counts") {
  CHECK(confusion(Labels{1, 0, 1}, Labels{1, 1, 0}) == Confusion{1, 1, 1, 0});
  CHECK(confusion(Labels{1, 1}, Labels{1, 1}) == Confusion{2, 0, 0, 0});
  CHECK(confusion(Labels{0, 0}, Labels{0, 0}) == Confusion{0, 0, 0, 2});
  CHECK_THROWS_AS(confusion(Labels{1}, Labels{1, 0}), ShapeError);
  CHECK(f1_score(Confusion{0, 3, 2, 1}) == 0.0);
}

TEST_CASE("best F1 examples") {
  const auto r = best_f1(as_scores({0.1, 0.9, 0.3}), Labels{0, 1, 0});
  CHECK(r.best_f1 == 1.0);
  CHECK(r.best_threshold == 0.9);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);

  const auto tie = best_f1(as_scores({0.5, 0.5}), Labels{1, 0});
  CHECK(tie.best_f1 == doctest::Approx(2.0 / 3.0));
  CHECK(tie.best_threshold == 0.5);
  CHECK(tie.precision == 0.5);

  CHECK_THROWS_AS(best_f1(as_scores({0.1, 0.2}), Labels{1, 1}), DegenerateLabels);
  CHECK_THROWS_AS(best_f1(as_scores({0.1, 0.2}), Labels{0, 0}), DegenerateLabels);
  CHECK_THROWS_AS(best_f1(as_scores({0.1, 0.2}), Labels{0, 1, 0}), ShapeError);
}

TEST_CASE("curve rows are consistent") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = uniform_int(rng, 2, 100);
    const auto y = random_labels(rng, n, rng.uniform(0.05, 0.5));
    const auto r = best_f1(as_scores(tied_scores(rng, n, 12)), y);
    double top = 0.0;
    for (std::size_t i = 0; i < r.curve.size(); ++i) {
      const auto& row = r.curve[i];
      if (i) CHECK(row.threshold > r.curve[i - 1].threshold);
      const double hm = row.precision + row.recall > 0 ? 2 * row.precision * row.recall / (row.precision + row.recall)
                                                       : 0.0;
      CHECK(row.f1 == doctest::Approx(hm).epsilon(1e-12));
      top = std::max(top, row.f1);
    }
    CHECK(r.best_f1 == top);
    CHECK(r.curve.back().f1 == 0.0);  // sentinel above the max predicts nothing
  }
}

TEST_CASE("best F1 and point-adjusted F1 match brute force") {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = uniform_int(rng, 2, 200);
    const auto y = random_labels(rng, n, rng.uniform(0.02, 0.6));
    const auto s = rng.below(2) ? tied_scores(rng, n, 8) : random_vector(rng, n);
    const auto r = best_f1(as_scores(s), y);
    const auto want = oracle_best_f1(s, y, false);
    CHECK(r.best_f1 == want.f1);
    CHECK(r.best_threshold == want.threshold);
    const double pa = pa_best_f1(as_scores(s), y);
    CHECK(pa == oracle_best_f1(s, y, true).f1);
    CHECK(pa >= r.best_f1);
  }
}

TEST_CASE("point adjustment") {
  CHECK(point_adjust(Labels{0, 1, 0, 0}, Labels{0, 1, 1, 0}) == Labels{0, 1, 1, 0});
  CHECK(point_adjust(Labels{0, 0, 0, 0}, Labels{0, 1, 1, 0}) == Labels{0, 0, 0, 0});
  CHECK(point_adjust(Labels{1, 0, 0, 0}, Labels{1, 1, 0, 1}) == Labels{1, 1, 0, 0});
  CHECK(point_adjust(Labels{1, 0, 1, 0}, Labels{0, 0, 0, 0}) == Labels{1, 0, 1, 0});
  CHECK_THROWS_AS(point_adjust(Labels{1}, Labels{1, 0}), ShapeError);

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = uniform_int(rng, 2, 80);
    const auto y = random_labels(rng, n, rng.uniform(0.05, 0.6));
    Labels pred(n);
    for (auto& p : pred) p = rng.below(4) == 0;
    const auto once = point_adjust(pred, y);
    CHECK(point_adjust(once, y) == once);
    CHECK(once == oracle_point_adjust(pred, y));
  }
}

TEST_CASE("point-adjusted F1 examples") {
  CHECK(pa_best_f1(as_scores({0.1, 0.2, 0.9, 0.3, 0.2, 0.1}), Labels{0, 0, 1, 1, 1, 0}) == 1.0);
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = uniform_int(rng, 10, 100);
    Labels y(n, 0);
    for (std::size_t i = 1; i < n; i += 3) y[i] = rng.below(2);  // isolated points only
    if (std::count(y.begin(), y.end(), 1) == 0) y[1] = 1;
    const auto s = random_vector(rng, n);
    CHECK(pa_best_f1(as_scores(s), y) == best_f1(as_scores(s), y).best_f1);
  }
}

TEST_CASE("AUC") {
  CHECK(auc(as_scores({1, 2, 3, 4}), Labels{0, 0, 1, 1}) == 1.0);
  CHECK(auc(as_scores({4, 3, 2, 1}), Labels{0, 0, 1, 1}) == 0.0);
  CHECK(auc(as_scores({7, 7, 7, 7, 7}), Labels{0, 1, 0, 1, 0}) == 0.5);
  CHECK_THROWS_AS(auc(as_scores({1, 2}), Labels{1, 1}), DegenerateLabels);

  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = uniform_int(rng, 2, 150);
    const auto y = random_labels(rng, n, rng.uniform(0.05, 0.7));
    const auto s = rng.below(2) ? tied_scores(rng, n, 6) : random_vector(rng, n);
    CHECK(std::abs(auc(as_scores(s), y) - oracle_trapezoid_auc(s, y)) < 1e-10);
  }
}

TEST_CASE("metrics are invariant under increasing transforms") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = uniform_int(rng, 2, 120);
    const auto y = random_labels(rng, n, rng.uniform(0.05, 0.5));
    const auto s = tied_scores(rng, n, 20);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(3.0 * s[i]) + 5.0;
    const auto r1 = best_f1(as_scores(s), y), r2 = best_f1(as_scores(t), y);
    CHECK(r1.best_f1 == r2.best_f1);
    CHECK(r1.auc == r2.auc);
    CHECK(pa_best_f1(as_scores(s), y) == pa_best_f1(as_scores(t), y));
  }
}

TEST_CASE("spike augmentation") {
  const double inf = std::numeric_limits<double>::max();
  CHECK(spike_augment(as_scores({1, 2, 3, 4, 5}), 2).scores == std::vector<double>{inf, 2, inf, 4, inf});
  CHECK(spike_augment(as_scores({1, 2, 3}), 1).scores == std::vector<double>{inf, inf, inf});
  CHECK(spike_augment(as_scores({1, 2, 3}), 7).scores == std::vector<double>{inf, 2, 3});
  CHECK_THROWS_AS(spike_augment(as_scores({1}), 0), ConfigError);
  const Labels y{0, 1, 1, 0, 0, 1};
  const auto all = spike_augment(as_scores({0, 0, 0, 0, 0, 0}), 1);
  // With every point spiked the sweep predicts everything at the top threshold.
  CHECK(pa_best_f1(all, y) == f1_score(confusion(Labels(6, 1), y)));
}

TEST_CASE("report serialization") {
  EvalOptions opts;
  const Labels y{0, 1, 1, 0, 0, 0, 1, 0};
  const auto s = as_scores({0.1, 0.8, 0.3, 0.2, 0.4, 0.1, 0.9, 0.0});
  auto j = to_json(evaluate(s, y, opts));
  for (auto key : {"best_f1", "best_threshold", "precision", "recall", "auc", "curve"}) CHECK(j.contains(key));
  CHECK_FALSE(j.contains("pa_best_f1"));
  CHECK_FALSE(j.contains("spiked_pa_best_f1"));

  opts.point_adjust = true;
  opts.spike_interval = 3;
  j = to_json(evaluate(s, y, opts));
  CHECK(j.contains("pa_best_f1"));
  CHECK(j.contains("spiked_pa_best_f1"));

  const auto path = std::filesystem::temp_directory_path() / "npsr_curve.csv";
  write_curve_csv(evaluate(s, y), path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "threshold,precision,recall,f1");
}
