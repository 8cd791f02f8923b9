#include "npsr/sequence_model.hpp"

#include <cmath>
#include <string>

#include "npsr/error.hpp"
#include "npsr/linalg.hpp"
#include "npsr/simd/kernels.hpp"

namespace npsr {

namespace {

void check_hyper(const SequenceHyperparams& hp) {
  if (hp.gamma == 0 || hp.delta == 0) throw ConfigError("gamma and delta must be >= 1");
  if (hp.delta > 2 * hp.gamma) throw ConfigError("delta must not exceed 2*gamma");
  if (!(hp.ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be >= 0");
  if (hp.stride == 0) throw ConfigError("stride must be >= 1");
}

void check_length(std::size_t length, std::size_t gamma, std::size_t delta) {
  if (length < 2 * gamma + delta) {
    throw ShapeError("series length " + std::to_string(length) + " is shorter than 2*gamma+delta = " +
                     std::to_string(2 * gamma + delta));
  }
}

void target_values(const Matrix& values, std::size_t start, std::size_t gamma, std::size_t delta,
                   std::span<double> out) {
  const std::size_t d = values.cols();
  for (std::size_t r = 0; r < delta; ++r) {
    const auto row = values.row(start + gamma + r);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
}

}  // namespace

void context_features(const Matrix& values, std::size_t start, std::size_t gamma, std::size_t delta,
                      std::span<double> out) {
  auto it = out.begin();
  for (std::size_t r = 0; r < gamma; ++r) {
    const auto row = values.row(start + r);
    it = std::copy(row.begin(), row.end(), it);
  }
  for (std::size_t r = 0; r < gamma; ++r) {
    const auto row = values.row(start + gamma + delta + r);
    it = std::copy(row.begin(), row.end(), it);
  }
}

RidgeSystem build_ridge_system(const LabeledSeries& train, const SequenceHyperparams& hp) {
  check_hyper(hp);
  check_length(train.length(), hp.gamma, hp.delta);
  const Matrix& values = train.values();
  const std::size_t d = values.cols();
  const std::size_t p = 2 * hp.gamma * d;
  const std::size_t q = hp.delta * d;
  const auto starts = window_starts(values.rows(), 2 * hp.gamma + hp.delta, hp.stride);
  const double n = static_cast<double>(starts.size());

  Matrix features(starts.size(), p);
  Matrix targets(starts.size(), q);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    context_features(values, starts[s], hp.gamma, hp.delta, features.row(s));
    target_values(values, starts[s], hp.gamma, hp.delta, targets.row(s));
  }

  RidgeSystem sys;
  sys.lambda = hp.ridge_lambda;
  sys.feature_mean.assign(p, 0.0);
  sys.target_mean.assign(q, 0.0);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    simd::axpy(1.0 / n, features.row(s), sys.feature_mean);
    simd::axpy(1.0 / n, targets.row(s), sys.target_mean);
  }
  for (std::size_t s = 0; s < starts.size(); ++s) {
    simd::axpy(-1.0, sys.feature_mean, features.row(s));
    simd::axpy(-1.0, sys.target_mean, targets.row(s));
  }

  sys.gram = Matrix(p, p);
  sys.rhs = Matrix(p, q);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto x = features.row(s);
    const auto y = targets.row(s);
    for (std::size_t i = 0; i < p; ++i) {
      if (x[i] == 0.0) continue;
      simd::axpy(x[i], x.subspan(i), sys.gram.row(i).subspan(i));
      simd::axpy(x[i], y, sys.rhs.row(i));
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    sys.gram(i, i) += hp.ridge_lambda;
    for (std::size_t j = i + 1; j < p; ++j) sys.gram(j, i) = sys.gram(i, j);
  }
  return sys;
}

SequenceModel solve_ridge(const RidgeSystem& system, const SequenceHyperparams& hp, std::size_t channels) {
  const Matrix lower = linalg::cholesky(system.gram);
  Matrix w = linalg::cholesky_solve(lower, system.rhs);

  // One refinement step against the original system.
  Matrix residual = system.rhs;
  const Matrix gw = linalg::multiply(system.gram, w);
  for (std::size_t i = 0; i < residual.values().size(); ++i) residual.values()[i] -= gw.values()[i];
  const Matrix correction = linalg::cholesky_solve(lower, residual);
  simd::axpy(1.0, correction.values(), w.values());

  const std::size_t p = system.gram.rows();
  const std::size_t q = system.rhs.cols();
  SequenceModel model;
  model.gamma = hp.gamma;
  model.delta = hp.delta;
  model.channels = channels;
  model.ridge_lambda = hp.ridge_lambda;
  model.stride = hp.stride;
  model.weights = Matrix(p + 1, q);
  for (std::size_t i = 0; i < p; ++i) {
    std::copy(w.row(i).begin(), w.row(i).end(), model.weights.row(i).begin());
  }
  auto bias = model.weights.row(p);
  std::copy(system.target_mean.begin(), system.target_mean.end(), bias.begin());
  for (std::size_t i = 0; i < p; ++i) simd::axpy(-system.feature_mean[i], w.row(i), bias);
  return model;
}

double normal_equation_residual(const SequenceModel& model, const RidgeSystem& system) {
  const std::size_t p = system.gram.rows();
  const Matrix w = model.weights.slice_rows(0, p);
  const Matrix gw = linalg::multiply(system.gram, w);
  double worst = 0.0;
  for (std::size_t i = 0; i < gw.values().size(); ++i) {
    worst = std::max(worst, std::abs(gw.values()[i] - system.rhs.values()[i]));
  }
  return worst;
}

SequenceModel train_sequence_model(const LabeledSeries& train, const SequenceHyperparams& hp) {
  return solve_ridge(build_ridge_system(train, hp), hp, train.channels());
}

Matrix predict_block(const SequenceModel& model, const Matrix& values, std::size_t start) {
  std::vector<double> features(model.feature_count());
  context_features(values, start, model.gamma, model.delta, features);
  Matrix out(model.delta, model.channels);
  auto flat = out.values();
  const auto bias = model.weights.row(model.feature_count());
  std::copy(bias.begin(), bias.end(), flat.begin());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i] != 0.0) simd::axpy(features[i], model.weights.row(i), flat);
  }
  return out;
}

std::vector<std::size_t> block_starts(std::size_t length, std::size_t gamma, std::size_t delta) {
  check_length(length, gamma, delta);
  std::vector<std::size_t> starts;
  const std::size_t end = length - gamma;
  for (std::size_t p = gamma; p + delta <= end; p += delta) starts.push_back(p);
  if (starts.back() + delta != end) starts.push_back(end - delta);
  return starts;
}

Matrix reconstruct_sequence(const SequenceModel& model, const Matrix& values) {
  if (values.cols() != model.channels) {
    throw ShapeError("series has " + std::to_string(values.cols()) + " channels, sequence model expects " +
                     std::to_string(model.channels));
  }
  const std::size_t length = values.rows();
  const auto starts = block_starts(length, model.gamma, model.delta);
  Matrix out(length - 2 * model.gamma, model.channels);
  std::size_t covered = model.gamma;  // first source row not yet written
  for (std::size_t p : starts) {
    const Matrix block = predict_block(model, values, p - model.gamma);
    for (std::size_t r = 0; r < model.delta; ++r) {
      const std::size_t source = p + r;
      if (source < covered) continue;  // overlap of the right-anchored block
      const auto row = block.row(r);
      std::copy(row.begin(), row.end(), out.row(source - model.gamma).begin());
    }
    covered = p + model.delta;
  }
  return out;
}

Matrix reconstruct_sequence(const SequenceModel& model, const LabeledSeries& series) {
  return reconstruct_sequence(model, series.values());
}

}  // namespace npsr
