#include "npsr/point_model.hpp"

#include <cmath>
#include <numeric>

#include "npsr/error.hpp"
#include "npsr/rng.hpp"
#include "npsr/simd/kernels.hpp"

namespace npsr {

std::string to_string(Optimizer opt) { return opt == Optimizer::adam ? "adam" : "sgd"; }

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") return Optimizer::sgd;
  if (name == "adam" || name == "Adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

PointModel init_point_model(std::size_t input_dim, const PointHyperparams& hp) {
  if (input_dim < 2) {
    throw ShapeError("point model needs at least 2 channels; univariate raw input cannot be reconstructed point-wise");
  }
  if (hp.latent_dim == 0 || hp.latent_dim > input_dim) {
    throw ConfigError("D_lat must be in [1, D] (D_lat=" + std::to_string(hp.latent_dim) +
                      ", D=" + std::to_string(input_dim) + ")");
  }
  Rng rng(hp.seed);
  PointModel m;
  m.hyper = hp;
  const double enc_bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double dec_bound = 1.0 / std::sqrt(static_cast<double>(hp.latent_dim));
  m.encoder_weights = Matrix(input_dim, hp.latent_dim);
  for (double& w : m.encoder_weights.values()) w = rng.uniform(-enc_bound, enc_bound);
  m.encoder_bias.resize(hp.latent_dim);
  for (double& b : m.encoder_bias) b = rng.uniform(-enc_bound, enc_bound);
  m.decoder_weights = Matrix(hp.latent_dim, input_dim);
  for (double& w : m.decoder_weights.values()) w = rng.uniform(-dec_bound, dec_bound);
  m.decoder_bias.resize(input_dim);
  for (double& b : m.decoder_bias) b = rng.uniform(-dec_bound, dec_bound);
  return m;
}

namespace {

void encode(const PointModel& m, std::span<const double> x, std::span<double> hidden) {
  std::copy(m.encoder_bias.begin(), m.encoder_bias.end(), hidden.begin());
  for (std::size_t i = 0; i < x.size(); ++i) simd::axpy(x[i], m.encoder_weights.row(i), hidden);
  for (double& h : hidden) h = std::tanh(h);
}

void decode(const PointModel& m, std::span<const double> hidden, std::span<double> out) {
  std::copy(m.decoder_bias.begin(), m.decoder_bias.end(), out.begin());
  for (std::size_t k = 0; k < hidden.size(); ++k) simd::axpy(hidden[k], m.decoder_weights.row(k), out);
}

PointGradient zero_gradient(const PointModel& m) {
  return PointGradient{Matrix(m.input_dim(), m.latent_dim()), std::vector<double>(m.latent_dim(), 0.0),
                       Matrix(m.latent_dim(), m.input_dim()), std::vector<double>(m.input_dim(), 0.0)};
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void reconstruct_row(const PointModel& model, std::span<const double> x, std::span<double> out) {
  std::vector<double> hidden(model.latent_dim());
  encode(model, x, hidden);
  decode(model, hidden, out);
}

double point_loss(const PointModel& model, const Matrix& data, std::span<const std::size_t> rows) {
  std::vector<double> out(model.input_dim());
  double total = 0.0;
  for (std::size_t r : rows) {
    reconstruct_row(model, data.row(r), out);
    total += simd::squared_distance(out, data.row(r));
  }
  return total / static_cast<double>(rows.size() * model.input_dim());
}

double point_loss_gradient(const PointModel& model, const Matrix& data, std::span<const std::size_t> rows,
                           PointGradient& grad) {
  grad = zero_gradient(model);
  const std::size_t dim = model.input_dim();
  const std::size_t lat = model.latent_dim();
  const double scale = 2.0 / static_cast<double>(rows.size() * dim);
  std::vector<double> hidden(lat), out(dim), resid(dim), dhidden(lat);
  double total = 0.0;
  for (std::size_t r : rows) {
    const auto x = data.row(r);
    encode(model, x, hidden);
    decode(model, hidden, out);
    for (std::size_t j = 0; j < dim; ++j) resid[j] = out[j] - x[j];
    total += simd::dot(resid, resid);
    // dL/dout = scale * resid
    for (std::size_t j = 0; j < dim; ++j) resid[j] *= scale;
    for (std::size_t k = 0; k < lat; ++k) {
      simd::axpy(hidden[k], resid, grad.decoder_weights.row(k));
      dhidden[k] = simd::dot(model.decoder_weights.row(k), resid) * (1.0 - hidden[k] * hidden[k]);
    }
    simd::axpy(1.0, resid, grad.decoder_bias);
    for (std::size_t i = 0; i < dim; ++i) simd::axpy(x[i], dhidden, grad.encoder_weights.row(i));
    simd::axpy(1.0, dhidden, grad.encoder_bias);
  }
  return total / static_cast<double>(rows.size() * dim);
}

namespace {

struct AdamState {
  PointGradient m, v;
  std::size_t step = 0;
};

void sgd_update(std::span<double> param, std::span<const double> g, double lr) { simd::axpy(-lr, g, param); }

void adam_update(std::span<double> param, std::span<const double> g, std::span<double> m, std::span<double> v,
                 double lr, std::size_t step) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    param[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
  }
}

}  // namespace

PointModel train_point_model(const LabeledSeries& train, const PointHyperparams& hp) {
  if (hp.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (train.length() < hp.batch_size) {
    throw ShapeError("training length " + std::to_string(train.length()) + " is shorter than batch_size " +
                     std::to_string(hp.batch_size));
  }
  PointModel model = init_point_model(train.channels(), hp);
  if (hp.epochs == 0) return model;

  const Matrix& data = train.values();
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffler(hp.seed ^ 0x9e3779b97f4a7c15ULL);

  PointGradient grad;
  AdamState adam{zero_gradient(model), zero_gradient(model), 0};

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    shuffler.shuffle(order.begin(), order.end());
    double epoch_total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += hp.batch_size) {
      const std::size_t end = std::min(begin + hp.batch_size, order.size());
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);
      const double loss = point_loss_gradient(model, data, batch, grad);
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch);
      epoch_total += loss * static_cast<double>(batch.size());
      if (hp.optimizer == Optimizer::sgd) {
        sgd_update(model.encoder_weights.values(), grad.encoder_weights.values(), hp.learn_rate);
        sgd_update(model.encoder_bias, grad.encoder_bias, hp.learn_rate);
        sgd_update(model.decoder_weights.values(), grad.decoder_weights.values(), hp.learn_rate);
        sgd_update(model.decoder_bias, grad.decoder_bias, hp.learn_rate);
      } else {
        ++adam.step;
        adam_update(model.encoder_weights.values(), grad.encoder_weights.values(), adam.m.encoder_weights.values(),
                    adam.v.encoder_weights.values(), hp.learn_rate, adam.step);
        adam_update(model.encoder_bias, grad.encoder_bias, adam.m.encoder_bias, adam.v.encoder_bias, hp.learn_rate,
                    adam.step);
        adam_update(model.decoder_weights.values(), grad.decoder_weights.values(), adam.m.decoder_weights.values(),
                    adam.v.decoder_weights.values(), hp.learn_rate, adam.step);
        adam_update(model.decoder_bias, grad.decoder_bias, adam.m.decoder_bias, adam.v.decoder_bias, hp.learn_rate,
                    adam.step);
      }
    }
    const double epoch_loss = epoch_total / static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss) || !all_finite(model.encoder_weights.values()) ||
        !all_finite(model.decoder_weights.values()) || !all_finite(model.encoder_bias) ||
        !all_finite(model.decoder_bias)) {
      throw TrainingDiverged(epoch);
    }
    model.epoch_losses.push_back(epoch_loss);
  }
  return model;
}

Matrix reconstruct_points(const PointModel& model, const Matrix& values) {
  if (values.cols() != model.input_dim()) {
    throw ShapeError("series has " + std::to_string(values.cols()) + " channels, point model expects " +
                     std::to_string(model.input_dim()));
  }
  Matrix out(values.rows(), values.cols());
  std::vector<double> hidden(model.latent_dim());
  for (std::size_t r = 0; r < values.rows(); ++r) {
    encode(model, values.row(r), hidden);
    decode(model, hidden, out.row(r));
  }
  return out;
}

Matrix reconstruct_points(const PointModel& model, const LabeledSeries& series) {
  return reconstruct_points(model, series.values());
}

}  // namespace npsr
