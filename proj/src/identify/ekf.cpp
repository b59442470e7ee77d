#include <cmath>
#include <stdexcept>
#include <string>

#include "internal.hpp"

namespace armcal {
namespace detail {

bool is_symmetric_psd(const Matrix24d& m, double tol) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Matrix24d> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

void record_covariance(FilterDiagnostics& diag, const Matrix24d& p) {
  Eigen::SelfAdjointEigenSolver<Matrix24d> es(p, Eigen::EigenvaluesOnly);
  diag.min_covariance_eigenvalue =
      std::min(diag.min_covariance_eigenvalue, es.eigenvalues().minCoeff());
  diag.max_covariance_asymmetry =
      std::max(diag.max_covariance_asymmetry, (p - p.transpose()).cwiseAbs().maxCoeff());
  ++diag.covariance_checks;
}

void ekf_pass(const Dataset& data, const CableEncoderModel& model, const DHChain& nominal,
              const EKFConfig& cfg, Vector24d& x, Matrix24d& p, FilterDiagnostics* diag) {
  for (std::size_t k = 0; k < data.size(); ++k) {
    const Sample& s = data.samples[k];
    // Predict: the parameters are static, only the covariance grows.
    p += cfg.q;

    const DHChain chain = apply_errors(nominal, KinematicErrorVector(x));
    const LengthJacobianRow j = cable_length_jacobian(model, chain, s.joints);
    // Z_k is expressed so that Z_k - J_k x equals the length residual of the
    // current estimate.
    const double innovation = s.measured_length - nominal_cable_length(model, chain, s.joints);
    const double z = innovation + j.dot(x);
    try {
      kalman_update<24>(x, p, j, z, cfg.r);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at sample " + std::to_string(k));
    }
    if (diag && cfg.track_covariance) record_covariance(*diag, p);
  }
}

Dataset with_targets(const Dataset& data, const CableEncoderModel& model, const DHChain& nominal,
                     const Eigen::VectorXd& targets) {
  if (static_cast<std::size_t>(targets.size()) != data.size()) {
    throw std::invalid_argument("target count does not match dataset size");
  }
  Dataset out;
  out.seed = data.seed;
  out.samples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    Sample s = data.samples[i];
    s.measured_length =
        nominal_cable_length(model, nominal, s.joints) + targets[static_cast<Eigen::Index>(i)];
    out.samples.push_back(s);
  }
  return out;
}

std::vector<JointConfig> joints_of(const Dataset& data) {
  std::vector<JointConfig> out;
  out.reserve(data.size());
  for (const Sample& s : data.samples) out.push_back(s.joints);
  return out;
}

}  // namespace detail

EKFConfig EKFConfig::diagonal(double p0_length, double p0_angle, double q_length, double q_angle,
                              double r, std::size_t passes) {
  EKFConfig cfg;
  const Vector24d p0 = PFConfig::grouped(p0_length, p0_angle);
  const Vector24d q = PFConfig::grouped(q_length, q_angle);
  cfg.p0 = p0.asDiagonal();
  cfg.q = q.asDiagonal();
  cfg.r = r;
  cfg.passes = passes;
  return cfg;
}

void EKFConfig::validate() const {
  if (!detail::is_symmetric_psd(p0)) throw std::invalid_argument("EKF P0 must be symmetric PSD");
  if (!detail::is_symmetric_psd(q)) throw std::invalid_argument("EKF Q must be symmetric PSD");
  if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("EKF R must be >= 0");
}

IdentificationResult ekf_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const EKFConfig& cfg) {
  cfg.validate();
  data.validate();
  model.validate();

  IdentificationResult result;
  result.method = Method::kEKF;
  Vector24d x = Vector24d::Zero();
  Matrix24d p = cfg.p0;
  result.history.push_back(rms(residuals(model, nominal, data)));
  for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
    detail::ekf_pass(data, model, nominal, cfg, x, p, &result.diagnostics);
    result.history.push_back(rms(residuals(model, apply_errors(nominal, KinematicErrorVector(x)), data)));
  }
  result.iterations = cfg.passes;
  result.x_hat = KinematicErrorVector(x);
  return result;
}

}  // namespace armcal
