#include "driftlab/autoencoder.hpp"

#include "driftlab/error.hpp"
#include "driftlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace driftlab {
namespace {

using RowVec = Eigen::RowVectorXd;

void glorot(Matrix& w, Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  w.resize(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
  }
}

Matrix normalize(const AEModel& model, const Matrix& curves) {
  const double range = model.input_max - model.input_min;
  return (curves.array() - model.input_min) / (range > 0.0 ? range : 1.0);
}

struct Forward {
  Matrix h1;
  Matrix latent;
  Matrix h3;
  Matrix out;
};

Forward forward(const AEModel& m, const Matrix& x) {
  Forward f;
  f.h1 = ((x * m.w1).rowwise() + m.b1).array().tanh();
  f.latent = (f.h1 * m.w2).rowwise() + m.b2;
  f.h3 = ((f.latent * m.w3).rowwise() + m.b3).array().tanh();
  f.out = (f.h3 * m.w4).rowwise() + m.b4;
  return f;
}

// Adam moment buffers for one parameter tensor.
struct AdamSlot {
  Matrix m;
  Matrix v;

  template <class Param>
  void step(Param& p, const Matrix& grad, double lr, double bc1, double bc2) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    if (m.size() == 0) {
      m = Matrix::Zero(grad.rows(), grad.cols());
      v = Matrix::Zero(grad.rows(), grad.cols());
    }
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const Matrix update =
        ((m.array() / bc1) / ((v.array() / bc2).sqrt() + eps)).matrix() * lr;
    p -= update.reshaped<Eigen::RowMajor>(p.rows(), p.cols());
  }
};

}  // namespace

void AETrainSpec::validate() const {
  if (latent_dim < 1 || hidden_width < 1 || epochs < 1 || batch_size < 1 || !(learning_rate > 0.0)) {
    throw ConfigError("autoencoder settings must all be positive");
  }
}

AEModel ae_train(const Matrix& curves, const AETrainSpec& spec) {
  spec.validate();
  const Eigen::Index T = curves.rows();
  const Eigen::Index m = curves.cols();
  if (T < spec.batch_size) {
    throw ConfigError("autoencoder batch size " + std::to_string(spec.batch_size) +
                      " exceeds the number of curves " + std::to_string(T));
  }
  const Eigen::Index H = spec.hidden_width;
  const Eigen::Index k = spec.latent_dim;

  AEModel model;
  model.input_min = curves.minCoeff();
  model.input_max = curves.maxCoeff();
  Rng rng = make_rng(spec.seed, streams::kAutoencoder);
  glorot(model.w1, m, H, rng);
  glorot(model.w2, H, k, rng);
  glorot(model.w3, k, H, rng);
  glorot(model.w4, H, m, rng);
  model.b1 = RowVec::Zero(H);
  model.b2 = RowVec::Zero(k);
  model.b3 = RowVec::Zero(H);
  model.b4 = RowVec::Zero(m);

  const Matrix x_all = normalize(model, curves);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(T));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  AdamSlot sw1, sb1, sw2, sb2, sw3, sb3, sw4, sb4;
  long step = 0;
  Matrix batch;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < T; start += spec.batch_size) {
      const Eigen::Index b = std::min<Eigen::Index>(spec.batch_size, T - start);
      batch.resize(b, m);
      for (Eigen::Index i = 0; i < b; ++i) batch.row(i) = x_all.row(order[static_cast<std::size_t>(start + i)]);

      const Forward f = forward(model, batch);
      const Matrix diff = f.out - batch;
      const double loss = diff.squaredNorm() / static_cast<double>(b * m);
      if (!std::isfinite(loss)) {
        throw TrainingFailure("autoencoder loss became non-finite in epoch " + std::to_string(epoch + 1));
      }
      loss_sum += loss * static_cast<double>(b);

      // Backpropagation of the mean squared error.
      const Matrix d_out = diff * (2.0 / static_cast<double>(b * m));
      const Matrix g_w4 = f.h3.transpose() * d_out;
      const RowVec g_b4 = d_out.colwise().sum();
      const Matrix d_z3 = ((d_out * model.w4.transpose()).array() * (1.0 - f.h3.array().square())).matrix();
      const Matrix g_w3 = f.latent.transpose() * d_z3;
      const RowVec g_b3 = d_z3.colwise().sum();
      const Matrix d_lat = d_z3 * model.w3.transpose();
      const Matrix g_w2 = f.h1.transpose() * d_lat;
      const RowVec g_b2 = d_lat.colwise().sum();
      const Matrix d_z1 = ((d_lat * model.w2.transpose()).array() * (1.0 - f.h1.array().square())).matrix();
      const Matrix g_w1 = batch.transpose() * d_z1;
      const RowVec g_b1 = d_z1.colwise().sum();

      ++step;
      const double bc1 = 1.0 - std::pow(0.9, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(0.999, static_cast<double>(step));
      const double lr = spec.learning_rate;
      sw1.step(model.w1, g_w1, lr, bc1, bc2);
      sb1.step(model.b1, g_b1, lr, bc1, bc2);
      sw2.step(model.w2, g_w2, lr, bc1, bc2);
      sb2.step(model.b2, g_b2, lr, bc1, bc2);
      sw3.step(model.w3, g_w3, lr, bc1, bc2);
      sb3.step(model.b3, g_b3, lr, bc1, bc2);
      sw4.step(model.w4, g_w4, lr, bc1, bc2);
      sb4.step(model.b4, g_b4, lr, bc1, bc2);
    }
    model.epoch_losses.push_back(loss_sum / static_cast<double>(T));
  }
  return model;
}

Matrix ae_encode(const AEModel& model, const Matrix& curves) {
  if (curves.cols() != model.input_dim()) throw DimensionError("curve length does not match the autoencoder input");
  return forward(model, normalize(model, curves)).latent;
}

Matrix ae_reconstruct(const AEModel& model, const Matrix& curves) {
  if (curves.cols() != model.input_dim()) throw DimensionError("curve length does not match the autoencoder input");
  const double range = model.input_max - model.input_min;
  const Matrix out = forward(model, normalize(model, curves)).out;
  return (out.array() * (range > 0.0 ? range : 1.0) + model.input_min).matrix();
}

}  // namespace driftlab
