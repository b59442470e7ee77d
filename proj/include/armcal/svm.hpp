#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "armcal/kinematics.hpp"

namespace armcal {

struct SVMConfig {
  std::size_t hidden_width = 16;
  std::size_t reference_count = 24;  // stored training configurations used by the kernel
  double lambda1 = 1e-3;             // L2 penalty on the output weights
  double learning_rate = 0.1;
  double momentum = 0.9;
  std::size_t epochs = 2000;
  double init_scale = 0.1;         // std of hidden-layer weights at initialisation
  double output_init_scale = 0.0;  // std of output weights; 0 starts from a zero predictor
  double validation_fraction = 0.0;  // held out for early stopping; 0 disables
  std::uint64_t seed = 1;

  void validate() const;
};

/// Gradients of the regularised squared loss with respect to every network
/// parameter, laid out like the parameters themselves.
struct NetworkGradient {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
};

/// One-hidden-layer regressor over inner-product kernel features.
///
///   k_j  = (q . r_j - mu_j) / s_j        r_j: stored reference configuration
///   h1   = W1 k + b1
///   h2   = 1 / (1 + exp(-h1))
///   out  = w2 . h2 + b2
///
/// mu/s standardise each kernel column over the training inputs.
class ResidualNetwork {
 public:
  ResidualNetwork() = default;
  ResidualNetwork(Eigen::MatrixXd references, Eigen::VectorXd feature_mean,
                  Eigen::VectorXd feature_scale, Eigen::MatrixXd w1, Eigen::VectorXd b1,
                  Eigen::VectorXd w2, double b2);

  double predict(const JointConfig& joints) const;
  Eigen::VectorXd predict(std::span<const JointConfig> joints) const;

  /// Standardised kernel features, one row per input.
  Eigen::MatrixXd features(std::span<const JointConfig> joints) const;

  /// 0.5 * lambda1 * |w2|^2 + (1 / 2n) * sum (target - out)^2
  double loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
              double lambda1) const;
  NetworkGradient gradient(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                           double lambda1) const;

  /// Flat parameter view (W1 row-major, b1, w2, b2) for optimisers and tests.
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& flat);
  static Eigen::VectorXd flatten(const NetworkGradient& g);

  std::size_t hidden_width() const { return static_cast<std::size_t>(b1_.size()); }
  const Eigen::MatrixXd& references() const { return references_; }
  const Eigen::VectorXd& feature_mean() const { return feature_mean_; }
  const Eigen::VectorXd& feature_scale() const { return feature_scale_; }
  const Eigen::MatrixXd& w1() const { return w1_; }
  const Eigen::VectorXd& b1() const { return b1_; }
  const Eigen::VectorXd& w2() const { return w2_; }
  double b2() const { return b2_; }

 private:
  Eigen::MatrixXd references_;  // reference_count x 6
  Eigen::VectorXd feature_mean_;
  Eigen::VectorXd feature_scale_;
  Eigen::MatrixXd w1_;  // hidden x reference_count
  Eigen::VectorXd b1_;
  Eigen::VectorXd w2_;
  double b2_ = 0.0;
};

/// Trains a ResidualNetwork by full-batch gradient descent with momentum.
/// When validation_fraction > 0 a seeded subset is held out to pick the epoch
/// count with the lowest held-out loss; the network is then retrained on all
/// samples for that many epochs.
/// Throws DivergedError if the training loss exceeds 1e6.
ResidualNetwork svm_fit(std::span<const JointConfig> joints, const Eigen::VectorXd& targets,
                        const SVMConfig& cfg);

}  // namespace armcal
