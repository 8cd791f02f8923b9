#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "npsr/matrix.hpp"
#include "npsr/series.hpp"

namespace npsr {

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer opt);
Optimizer parse_optimizer(const std::string& name);

struct PointHyperparams {
  std::size_t latent_dim = 10;
  double learn_rate = 1e-4;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::sgd;

  bool operator==(const PointHyperparams&) const = default;
};

/// Point-wise autoencoder: x -> tanh(x E + b_e) -> h D + b_d.
/// Encoder is D x D_lat, decoder is D_lat x D.
struct PointModel {
  Matrix encoder_weights;
  std::vector<double> encoder_bias;
  Matrix decoder_weights;
  std::vector<double> decoder_bias;
  PointHyperparams hyper;
  /// Mean training loss per epoch, in order.
  std::vector<double> epoch_losses;

  std::size_t input_dim() const noexcept { return encoder_weights.rows(); }
  std::size_t latent_dim() const noexcept { return encoder_weights.cols(); }

  bool operator==(const PointModel&) const = default;
};

/// Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
PointModel init_point_model(std::size_t input_dim, const PointHyperparams& hp);

/// Gradients of the loss with respect to every parameter, same layout as PointModel.
struct PointGradient {
  Matrix encoder_weights;
  std::vector<double> encoder_bias;
  Matrix decoder_weights;
  std::vector<double> decoder_bias;
};

/// Reconstruction of a single row into `out` (size D).
void reconstruct_row(const PointModel& model, std::span<const double> x, std::span<double> out);

/// Mean over rows and channels of the squared reconstruction error for the given rows.
double point_loss(const PointModel& model, const Matrix& data, std::span<const std::size_t> rows);

/// Loss and its analytic gradient over the given rows.
double point_loss_gradient(const PointModel& model, const Matrix& data, std::span<const std::size_t> rows,
                           PointGradient& grad);

/// Mini-batch training on individual rows with seeded shuffling. Requires
/// D >= 2 and T >= batch_size; throws TrainingDiverged on a non-finite loss.
PointModel train_point_model(const LabeledSeries& train, const PointHyperparams& hp);

/// Row t of the output depends only on row t of the input.
Matrix reconstruct_points(const PointModel& model, const LabeledSeries& series);
Matrix reconstruct_points(const PointModel& model, const Matrix& values);

}  // namespace npsr
