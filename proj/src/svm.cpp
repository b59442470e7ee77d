#include "armcal/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "armcal/errors.hpp"

namespace armcal {
namespace {

constexpr double kDivergenceLoss = 1e6;

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

Eigen::MatrixXd stack_joints(std::span<const JointConfig> joints) {
  Eigen::MatrixXd q(static_cast<Eigen::Index>(joints.size()), 6);
  for (std::size_t i = 0; i < joints.size(); ++i) q.row(static_cast<Eigen::Index>(i)) = joints[i].transpose();
  return q;
}

struct ForwardPass {
  Eigen::MatrixXd hidden;  // h2, n x H
  Eigen::VectorXd output;
};

ForwardPass forward(const Eigen::MatrixXd& features, const Eigen::MatrixXd& w1,
                    const Eigen::VectorXd& b1, const Eigen::VectorXd& w2, double b2) {
  Eigen::MatrixXd h1 = features * w1.transpose();
  h1.rowwise() += b1.transpose();
  ForwardPass f;
  f.hidden = sigmoid(h1.array()).matrix();
  f.output = (f.hidden * w2).array() + b2;
  return f;
}

}  // namespace

void SVMConfig::validate() const {
  if (hidden_width < 1) throw std::invalid_argument("SVM hidden width must be >= 1");
  if (reference_count < 1) throw std::invalid_argument("SVM needs at least one reference");
  if (!std::isfinite(lambda1) || lambda1 < 0.0) throw std::invalid_argument("SVM lambda1 must be >= 0");
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
    throw std::invalid_argument("SVM learning rate must be > 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("SVM momentum must lie in [0, 1)");
  if (!std::isfinite(init_scale) || init_scale < 0.0 || !std::isfinite(output_init_scale) ||
      output_init_scale < 0.0) {
    throw std::invalid_argument("SVM initialisation scales must be >= 0");
  }
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("SVM validation fraction must lie in [0, 1)");
  }
}

ResidualNetwork::ResidualNetwork(Eigen::MatrixXd references, Eigen::VectorXd feature_mean,
                                 Eigen::VectorXd feature_scale, Eigen::MatrixXd w1,
                                 Eigen::VectorXd b1, Eigen::VectorXd w2, double b2)
    : references_(std::move(references)),
      feature_mean_(std::move(feature_mean)),
      feature_scale_(std::move(feature_scale)),
      w1_(std::move(w1)),
      b1_(std::move(b1)),
      w2_(std::move(w2)),
      b2_(b2) {
  const Eigen::Index m = references_.rows();
  const Eigen::Index h = b1_.size();
  if (references_.cols() != 6 || feature_mean_.size() != m || feature_scale_.size() != m ||
      w1_.rows() != h || w1_.cols() != m || w2_.size() != h) {
    throw std::invalid_argument("ResidualNetwork: inconsistent parameter shapes");
  }
  if ((feature_scale_.array() <= 0.0).any()) {
    throw std::invalid_argument("ResidualNetwork: feature scales must be > 0");
  }
}

Eigen::MatrixXd ResidualNetwork::features(std::span<const JointConfig> joints) const {
  Eigen::MatrixXd k = stack_joints(joints) * references_.transpose();
  k.rowwise() -= feature_mean_.transpose();
  return k.array().rowwise() / feature_scale_.transpose().array();
}

double ResidualNetwork::predict(const JointConfig& joints) const {
  return predict(std::span<const JointConfig>(&joints, 1))[0];
}

Eigen::VectorXd ResidualNetwork::predict(std::span<const JointConfig> joints) const {
  return forward(features(joints), w1_, b1_, w2_, b2_).output;
}

double ResidualNetwork::loss(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                             double lambda1) const {
  const ForwardPass f = forward(features, w1_, b1_, w2_, b2_);
  const auto n = static_cast<double>(targets.size());
  return 0.5 * lambda1 * w2_.squaredNorm() + (targets - f.output).squaredNorm() / (2.0 * n);
}

NetworkGradient ResidualNetwork::gradient(const Eigen::MatrixXd& features,
                                          const Eigen::VectorXd& targets, double lambda1) const {
  const ForwardPass f = forward(features, w1_, b1_, w2_, b2_);
  const auto n = static_cast<double>(targets.size());
  const Eigen::VectorXd d_out = -(targets - f.output) / n;  // d loss / d output_i

  NetworkGradient g;
  g.w2 = f.hidden.transpose() * d_out + lambda1 * w2_;
  g.b2 = d_out.sum();
  const Eigen::MatrixXd d_hidden =
      ((d_out * w2_.transpose()).array() * f.hidden.array() * (1.0 - f.hidden.array())).matrix();
  g.w1 = d_hidden.transpose() * features;
  g.b1 = d_hidden.colwise().sum().transpose();
  return g;
}

Eigen::VectorXd ResidualNetwork::parameters() const {
  const Eigen::Index h = b1_.size(), m = w1_.cols();
  Eigen::VectorXd flat(h * m + 2 * h + 1);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) flat[k++] = w1_(i, j);
  }
  flat.segment(k, h) = b1_;
  k += h;
  flat.segment(k, h) = w2_;
  k += h;
  flat[k] = b2_;
  return flat;
}

void ResidualNetwork::set_parameters(const Eigen::VectorXd& flat) {
  const Eigen::Index h = b1_.size(), m = w1_.cols();
  if (flat.size() != h * m + 2 * h + 1) throw std::invalid_argument("parameter vector has wrong size");
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) w1_(i, j) = flat[k++];
  }
  b1_ = flat.segment(k, h);
  k += h;
  w2_ = flat.segment(k, h);
  k += h;
  b2_ = flat[k];
}

Eigen::VectorXd ResidualNetwork::flatten(const NetworkGradient& g) {
  const Eigen::Index h = g.b1.size(), m = g.w1.cols();
  Eigen::VectorXd flat(h * m + 2 * h + 1);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) flat[k++] = g.w1(i, j);
  }
  flat.segment(k, h) = g.b1;
  k += h;
  flat.segment(k, h) = g.w2;
  k += h;
  flat[k] = g.b2;
  return flat;
}

ResidualNetwork svm_fit(std::span<const JointConfig> joints, const Eigen::VectorXd& targets,
                        const SVMConfig& cfg) {
  cfg.validate();
  const std::size_t n = joints.size();
  if (n == 0) throw std::invalid_argument("svm_fit: no training data");
  if (static_cast<std::size_t>(targets.size()) != n) {
    throw std::invalid_argument("svm_fit: target count does not match inputs");
  }
  if (!targets.allFinite()) throw std::invalid_argument("svm_fit: targets must be finite");

  // Reference configurations: evenly spaced training inputs.
  const std::size_t m = std::min(cfg.reference_count, n);
  Eigen::MatrixXd refs(static_cast<Eigen::Index>(m), 6);
  for (std::size_t j = 0; j < m; ++j) {
    refs.row(static_cast<Eigen::Index>(j)) = joints[j * n / m].transpose();
  }
  const Eigen::MatrixXd raw = stack_joints(joints) * refs.transpose();
  const Eigen::VectorXd mean = raw.colwise().mean().transpose();
  Eigen::VectorXd scale =
      ((raw.rowwise() - mean.transpose()).colwise().squaredNorm().transpose() / static_cast<double>(n))
          .cwiseSqrt();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale[j] > 1e-12)) scale[j] = 1.0;
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto h = static_cast<Eigen::Index>(cfg.hidden_width);
  Eigen::MatrixXd w1(h, static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = cfg.init_scale * gauss(rng);
  Eigen::VectorXd w2(h);
  for (Eigen::Index i = 0; i < h; ++i) w2[i] = cfg.output_init_scale * gauss(rng);
  ResidualNetwork net(refs, mean, scale, w1, Eigen::VectorXd::Zero(h), w2, 0.0);

  // Seeded train / validation split.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t n_val = 0;
  if (cfg.validation_fraction > 0.0 && n >= 5) {
    std::shuffle(order.begin(), order.end(), rng);
    n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(cfg.validation_fraction * static_cast<double>(n)));
  }
  const Eigen::MatrixXd all_features = net.features(joints);
  const auto gather = [&](std::size_t begin, std::size_t end, Eigen::MatrixXd& f,
                          Eigen::VectorXd& t) {
    f.resize(static_cast<Eigen::Index>(end - begin), all_features.cols());
    t.resize(static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      f.row(static_cast<Eigen::Index>(i - begin)) =
          all_features.row(static_cast<Eigen::Index>(order[i]));
      t[static_cast<Eigen::Index>(i - begin)] = targets[static_cast<Eigen::Index>(order[i])];
    }
  };

  const Eigen::VectorXd initial = net.parameters();
  // Momentum gradient descent for `epochs` steps from the initial parameters.
  // Returns the epoch count with the lowest validation loss (or `epochs`).
  const auto train = [&](const Eigen::MatrixXd& fit_f, const Eigen::VectorXd& fit_t,
                         const Eigen::MatrixXd* val_f, const Eigen::VectorXd* val_t,
                         std::size_t epochs) {
    Eigen::VectorXd params = initial;
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(params.size());
    net.set_parameters(params);
    std::size_t best_epoch = 0;
    double best_val = val_f ? net.loss(*val_f, *val_t, 0.0) : 0.0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
      const double loss = net.loss(fit_f, fit_t, cfg.lambda1);
      if (!std::isfinite(loss) || loss > kDivergenceLoss) {
        throw DivergedError("network training diverged at epoch " + std::to_string(epoch) +
                            "; reduce the learning rate");
      }
      velocity = cfg.momentum * velocity -
                 cfg.learning_rate * ResidualNetwork::flatten(net.gradient(fit_f, fit_t, cfg.lambda1));
      params += velocity;
      net.set_parameters(params);
      if (val_f) {
        const double val = net.loss(*val_f, *val_t, 0.0);
        if (val < best_val) {
          best_val = val;
          best_epoch = epoch + 1;
        }
      }
    }
    const double loss = net.loss(fit_f, fit_t, cfg.lambda1);
    if (!std::isfinite(loss) || loss > kDivergenceLoss) {
      throw DivergedError("network training diverged; reduce the learning rate");
    }
    return val_f ? best_epoch : epochs;
  };

  std::size_t epochs = cfg.epochs;
  if (n_val) {
    // Choose the stopping epoch on held-out data, then refit on everything.
    Eigen::MatrixXd fit_f, val_f;
    Eigen::VectorXd fit_t, val_t;
    gather(0, n - n_val, fit_f, fit_t);
    gather(n - n_val, n, val_f, val_t);
    epochs = train(fit_f, fit_t, &val_f, &val_t, cfg.epochs);
  }
  train(all_features, targets, nullptr, nullptr, epochs);
  return net;
}

}  // namespace armcal
