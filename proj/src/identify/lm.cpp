#include <cmath>
#include <stdexcept>

#include "internal.hpp"

namespace armcal {
namespace {

constexpr std::size_t kMaxRetries = 12;

struct Linearisation {
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd residual;
};

Linearisation linearise(const Dataset& data, const CableEncoderModel& model, const DHChain& chain) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Linearisation lin{Eigen::MatrixXd(n, 24), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = data.samples[static_cast<std::size_t>(i)];
    lin.jacobian.row(i) = cable_length_jacobian(model, chain, s.joints);
    lin.residual[i] = s.measured_length - nominal_cable_length(model, chain, s.joints);
  }
  return lin;
}

}  // namespace

void LMConfig::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("LM lambda must be >= 0");
  if (!initial.flat().allFinite()) throw std::invalid_argument("LM initial estimate not finite");
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual,
                        double lambda) {
  if (jacobian.rows() != residual.size()) {
    throw std::invalid_argument("lm_step: Jacobian rows do not match residual length");
  }
  const Eigen::Index p = jacobian.cols();
  Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
  normal.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = jacobian.transpose() * residual;

  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jacobian);
    if (qr.rank() < p) {
      throw NumericalError("LM normal matrix is rank deficient (rank " +
                           std::to_string(qr.rank()) + " of " + std::to_string(p) +
                           "); use lambda > 0");
    }
    return qr.solve(residual);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) throw NumericalError("LM normal matrix factorisation failed");
  return ldlt.solve(rhs);
}

IdentificationResult lm_identify(const Dataset& data, const CableEncoderModel& model,
                                 const DHChain& nominal, const LMConfig& cfg) {
  cfg.validate();
  data.validate();
  model.validate();

  IdentificationResult result;
  result.method = Method::kLM;
  KinematicErrorVector x = cfg.initial;
  Linearisation lin = linearise(data, model, apply_errors(nominal, x));
  double cost = rms(lin.residual);
  result.history.push_back(cost);

  double lambda = cfg.lambda;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    bool accepted = false;
    double step_norm = 0.0;
    for (std::size_t attempt = 0; attempt <= kMaxRetries && !accepted; ++attempt) {
      const Eigen::VectorXd step = lm_step(lin.jacobian, lin.residual, lambda);
      step_norm = step.norm();
      if (step_norm < cfg.step_tolerance) break;
      KinematicErrorVector trial = x;
      trial.flat() += step;
      Linearisation next = linearise(data, model, apply_errors(nominal, trial));
      const double trial_cost = rms(next.residual);
      if (trial_cost <= cost) {
        x = trial;
        lin = std::move(next);
        cost = trial_cost;
        accepted = true;
        lambda = std::max(cfg.lambda, lambda / 10.0);
      } else {
        lambda = lambda > 0.0 ? lambda * 10.0 : 1e-6;
      }
    }
    ++result.iterations;
    result.history.push_back(cost);
    if (!accepted) break;
  }
  result.x_hat = x;
  return result;
}

}  // namespace armcal
