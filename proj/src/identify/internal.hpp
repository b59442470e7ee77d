#pragma once

#include "armcal/identify.hpp"

namespace armcal::detail {

bool is_symmetric_psd(const Matrix24d& m, double tol = 1e-12);

void record_covariance(FilterDiagnostics& diag, const Matrix24d& p);

/// One EKF sweep over `data`, relinearising at the current estimate for every
/// sample. Throws NumericalError naming the sample on a singular innovation.
void ekf_pass(const Dataset& data, const CableEncoderModel& model, const DHChain& nominal,
              const EKFConfig& cfg, Vector24d& x, Matrix24d& p, FilterDiagnostics* diag);

/// Dataset whose measured lengths are nominal length + target.
Dataset with_targets(const Dataset& data, const CableEncoderModel& model, const DHChain& nominal,
                     const Eigen::VectorXd& targets);

std::vector<JointConfig> joints_of(const Dataset& data);

}  // namespace armcal::detail
