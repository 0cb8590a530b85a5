#pragma once

#include "driftlab/types.hpp"

#include <cstdint>
#include <vector>

namespace driftlab {

struct AETrainSpec {
  int latent_dim = 2;
  int hidden_width = 64;
  int epochs = 50;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const AETrainSpec&, const AETrainSpec&) = default;
};

/// Fully connected autoencoder m -> hidden -> k -> hidden -> m with tanh
/// hidden layers and linear latent/output layers.
struct AEModel {
  // Encoder.
  Matrix w1;  // m x hidden
  Eigen::RowVectorXd b1;
  Matrix w2;  // hidden x k
  Eigen::RowVectorXd b2;
  // Decoder.
  Matrix w3;  // k x hidden
  Eigen::RowVectorXd b3;
  Matrix w4;  // hidden x m
  Eigen::RowVectorXd b4;
  // Global min-max normalization of the training curves.
  double input_min = 0.0;
  double input_max = 1.0;
  std::vector<double> epoch_losses;  // mean training loss per epoch

  int input_dim() const noexcept { return static_cast<int>(w1.rows()); }
  int latent_dim() const noexcept { return static_cast<int>(w2.cols()); }
};

/// Trains on the rows of `curves` with Adam on the mean squared reconstruction
/// error. Deterministic given spec.seed. Throws TrainingFailure on a
/// non-finite loss.
AEModel ae_train(const Matrix& curves, const AETrainSpec& spec);

/// Latent codes, one row per curve (T x k).
Matrix ae_encode(const AEModel& model, const Matrix& curves);

/// Reconstructions in the original value scale (T x m).
Matrix ae_reconstruct(const AEModel& model, const Matrix& curves);

}  // namespace driftlab
