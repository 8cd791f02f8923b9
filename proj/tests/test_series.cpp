#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "npsr/error.hpp"
#include "npsr/series.hpp"
#include "support/generators.hpp"

using namespace npsr;
using npsr::testing::random_matrix;
using npsr::testing::uniform_int;

namespace {

CsvOptions with_label(const std::string& col) { return CsvOptions{true, col}; }

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / ("npsr_series_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("parse labeled csv") {
  const auto s = parse_csv("a,b,y\n1,2,0\n3,4,1\n5,6,0", with_label("y"));
  CHECK(s.length() == 3);
  CHECK(s.channels() == 2);
  CHECK(*s.labels() == Labels{0, 1, 0});
  CHECK(s.values()(2, 1) == 6.0);
  CHECK(s.channel_names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("label column by index and headerless input") {
  const auto s = parse_csv("1,0,2\n3,1,4\n", CsvOptions{false, std::string("1")});
  CHECK(*s.labels() == Labels{0, 1});
  CHECK(s.values() == Matrix::from_rows({{1, 2}, {3, 4}}));
}

TEST_CASE("forward fill") {
  SUBCASE("empty cell") {
    const auto s = parse_csv("a,b\n1,2\n3,\n5,6\n");
    CHECK(s.values()(1, 1) == 2.0);
  }
  SUBCASE("NaN literal") {
    const auto s = parse_csv("a,b\n1,2\n3,NaN\n5,6\n");
    CHECK(s.values()(1, 1) == 2.0);
    CHECK(s.values()(2, 1) == 6.0);
  }
  SUBCASE("missing first value becomes zero") {
    const auto s = parse_csv("a,b\n,2\n,3\n4,5\n");
    CHECK(s.values()(0, 0) == 0.0);
    CHECK(s.values()(1, 0) == 0.0);
    CHECK(s.values()(2, 0) == 4.0);
  }
  SUBCASE("no NaN survives") {
    Rng rng(7);
    std::string text = "a,b,c\n";
    for (int r = 0; r < 50; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (c) text += ',';
        if (rng.uniform() > 0.3) text += std::to_string(rng.uniform());
        else if (rng.uniform() > 0.5) text += "nan";
      }
      text += '\n';
    }
    const auto s = parse_csv(text);
    for (double v : s.values().values()) CHECK_FALSE(std::isnan(v));
  }
}

TEST_CASE("csv errors") {
  CHECK_THROWS_AS(parse_csv("a,b,y\n1,2,2\n", with_label("y")), LabelError);
  CHECK_THROWS_AS(parse_csv("a,b,y\n1,2,0.5\n", with_label("y")), LabelError);
  CHECK_THROWS_AS(parse_csv(""), EmptyInput);
  CHECK_THROWS_AS(parse_csv("a,b\n"), EmptyInput);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n3\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n", with_label("z")), ConfigError);
  CHECK_THROWS_AS(load_csv("/nonexistent/npsr.csv"), IoError);

  try {
    parse_csv("a,b\n1,2\n3,4\n5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 4);
  }
}

TEST_CASE("csv round trip is exact") {
  Rng rng(3);
  Matrix m = random_matrix(rng, 20, 3, -1e3, 1e3);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  const LabeledSeries s(m, Labels(20, 0));
  const auto path = std::filesystem::temp_directory_path() / "npsr_series_roundtrip.csv";
  write_csv(s, path);
  const auto back = load_csv(path, with_label("label"));
  CHECK(back.values() == m);
  CHECK(*back.labels() == *s.labels());
}

TEST_CASE("score csv round trip") {
  ScoreSeries s{{0.1, 1.0 / 3.0, 2e-17}, ScoreKind::induced, 7};
  const auto path = std::filesystem::temp_directory_path() / "npsr_scores.csv";
  write_scores_csv(s, path);
  const auto back = load_scores_csv(path, ScoreKind::induced);
  CHECK(back.scores == s.scores);
  CHECK(back.time_origin == 7);

  CHECK_THROWS_AS(load_scores_csv(temp_file("gap.csv", "time_index,score\n3,1\n5,2\n"), ScoreKind::anomaly),
                  ParseError);
}

TEST_CASE("series validation") {
  CHECK_THROWS_AS(LabeledSeries(Matrix(0, 2)), EmptyInput);
  CHECK_THROWS_AS(LabeledSeries(Matrix(3, 2), Labels{0, 1}), LabelError);
  CHECK_THROWS_AS(LabeledSeries(Matrix(2, 2), Labels{0, 2}), LabelError);
  CHECK_THROWS_AS(LabeledSeries(Matrix(2, 2), std::nullopt, {"a"}), ShapeError);
  CHECK_THROWS_AS(LabeledSeries(Matrix(2, 2)).require_labels(), LabelError);
}

TEST_CASE("minmax fit") {
  const LabeledSeries s(Matrix::from_rows({{0, 3, 0}, {5, 3, 1}, {10, 3, 4}}));
  const auto st = minmax_fit(s);
  CHECK(st.min == std::vector<double>{0, 3, 0});
  CHECK(st.max == std::vector<double>{10, 3, 4});
  CHECK_FALSE(st.is_constant(0));
  CHECK(st.is_constant(1));

  const auto two = minmax_fit(LabeledSeries(Matrix::from_rows({{0, 1}, {4, 3}})));
  CHECK(two.min == std::vector<double>{0, 1});
  CHECK(two.max == std::vector<double>{4, 3});
}

TEST_CASE("minmax apply") {
  MinMaxStats st{{0, 3}, {10, 3}};
  const auto out = minmax_apply(LabeledSeries(Matrix::from_rows({{5, 3}, {12, 3}})), st);
  CHECK(out.values()(0, 0) == 0.5);
  CHECK(out.values()(1, 0) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(out.values()(0, 1) == 0.0);
  CHECK_THROWS_AS(minmax_apply(LabeledSeries(Matrix(2, 3)), st), ShapeError);
}

TEST_CASE("minmax inverse recovers values") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = uniform_int(rng, 1, 40), D = uniform_int(rng, 1, 5);
    const LabeledSeries s(random_matrix(rng, T, D, -1e4, 1e4));
    const auto st = minmax_fit(s);
    const auto back = minmax_invert(minmax_apply(s, st), st);
    for (std::size_t c = 0; c < D; ++c) {
      if (st.is_constant(c)) continue;
      for (std::size_t r = 0; r < T; ++r) {
        const double x = s.values()(r, c);
        CHECK(std::abs(back.values()(r, c) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
      }
    }
  }
}

TEST_CASE("downsample") {
  const LabeledSeries s(Matrix::from_rows({{0}, {2}, {4}, {6}}), Labels{0, 0, 1, 0});
  const auto ds = downsample(s, 2);
  CHECK(ds.values() == Matrix::from_rows({{1}, {5}}));
  CHECK(*ds.labels() == Labels{0, 1});

  const auto id = downsample(s, 1);
  CHECK(id.values() == s.values());
  CHECK(*id.labels() == *s.labels());

  const auto odd = downsample(LabeledSeries(Matrix::from_rows({{1}, {2}, {3}, {4}, {5}})), 2);
  CHECK(odd.length() == 3);
  CHECK(odd.values()(2, 0) == 5.0);
  CHECK_THROWS_AS(downsample(s, 0), ConfigError);
}

TEST_CASE("window starts") {
  CHECK(window_starts(10, 5, 5) == std::vector<std::size_t>{0, 5});
  CHECK(window_starts(10, 4, 3) == std::vector<std::size_t>{0, 3, 6});
  CHECK(window_starts(4, 4, 10) == std::vector<std::size_t>{0});
  CHECK(window_starts(10, 4, 4) == std::vector<std::size_t>{0, 4, 6});
  CHECK_THROWS_AS(window_starts(3, 4, 1), ShapeError);
}

TEST_CASE("windows cover every index when stride <= window length") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t T = uniform_int(rng, 1, 120);
    const std::size_t len = uniform_int(rng, 1, T);
    const std::size_t stride = uniform_int(rng, 1, len);
    std::vector<int> covered(T, 0);
    for (auto s : window_starts(T, len, stride)) {
      REQUIRE(s + len <= T);
      for (std::size_t i = s; i < s + len; ++i) covered[i] = 1;
    }
    CHECK(std::count(covered.begin(), covered.end(), 1) == static_cast<long>(T));
  }
}

TEST_CASE("a stride longer than the window skips rows") {
  // Starts stay on the stride grid; only the final window is re-anchored.
  CHECK(window_starts(12, 2, 5) == std::vector<std::size_t>{0, 5, 10});
  CHECK(window_starts(13, 2, 5) == std::vector<std::size_t>{0, 5, 10, 11});
}

TEST_CASE("extract windows") {
  const LabeledSeries s(Matrix::from_rows({{0}, {1}, {2}, {3}, {4}}));
  const auto w = extract_windows(s, 2, 2);
  REQUIRE(w.size() == 3);
  CHECK(w[2].start == 3);
  CHECK(w[2].values == Matrix::from_rows({{3}, {4}}));
}

TEST_CASE("slice keeps alignment") {
  const LabeledSeries s(Matrix::from_rows({{0}, {1}, {2}, {3}}), Labels{0, 1, 1, 0}, {}, 10);
  const auto sl = slice(s, 1, 3);
  CHECK(sl.time_origin() == 11);
  CHECK(*sl.labels() == Labels{1, 1});
}
