#pragma once

#include <cstddef>
#include <vector>

#include "npsr/matrix.hpp"
#include "npsr/series.hpp"

namespace npsr {

struct SequenceHyperparams {
  std::size_t gamma = 25;  ///< context half-width
  std::size_t delta = 6;   ///< predicted block width
  double ridge_lambda = 1e-3;
  std::size_t stride = 1;  ///< spacing of training windows
};

/// Ridge predictor of the middle delta rows from the gamma rows before and the
/// gamma rows after them. `weights` is (2*gamma*D + 1) x (delta*D); the last
/// row is the bias.
struct SequenceModel {
  std::size_t gamma = 0;
  std::size_t delta = 0;
  std::size_t channels = 0;
  double ridge_lambda = 0.0;
  std::size_t stride = 1;
  Matrix weights;

  std::size_t window_len() const noexcept { return 2 * gamma + delta; }
  std::size_t feature_count() const noexcept { return 2 * gamma * channels; }
  std::size_t target_count() const noexcept { return delta * channels; }

  bool operator==(const SequenceModel&) const = default;
};

/// Flattened context for the window starting at `start`: rows [start, start+gamma)
/// then [start+gamma+delta, start+2*gamma+delta). Target rows are never read.
void context_features(const Matrix& values, std::size_t start, std::size_t gamma, std::size_t delta,
                      std::span<double> out);

/// Centered normal equations (X^T X + lambda I) W = X^T Y over the training
/// windows; the intercept is not penalized.
struct RidgeSystem {
  Matrix gram;
  Matrix rhs;
  std::vector<double> feature_mean;
  std::vector<double> target_mean;
  double lambda = 0.0;
};

RidgeSystem build_ridge_system(const LabeledSeries& train, const SequenceHyperparams& hp);

/// Solves the system by Cholesky with one step of iterative refinement.
SequenceModel solve_ridge(const RidgeSystem& system, const SequenceHyperparams& hp, std::size_t channels);

/// max |(X^T X + lambda I) W - X^T Y| with W the model's non-bias rows.
double normal_equation_residual(const SequenceModel& model, const RidgeSystem& system);

/// Requires T >= 2*gamma + delta; throws SingularSystem when lambda = 0 and the
/// context features are rank-deficient.
SequenceModel train_sequence_model(const LabeledSeries& train, const SequenceHyperparams& hp);

/// Prediction of the delta block for the window starting at `start`, as delta x D.
Matrix predict_block(const SequenceModel& model, const Matrix& values, std::size_t start);

/// Target block starts tiling [gamma, T - gamma) with the last block anchored to the right edge.
std::vector<std::size_t> block_starts(std::size_t length, std::size_t gamma, std::size_t delta);

/// One prediction for every interior row; output row i is source row gamma + i.
Matrix reconstruct_sequence(const SequenceModel& model, const LabeledSeries& series);
Matrix reconstruct_sequence(const SequenceModel& model, const Matrix& values);

}  // namespace npsr
