#pragma once

#include <vector>

#include "armcal/identify.hpp"

namespace armcal {

struct EnsembleOptions {
  std::vector<Method> order{kAllMethods.begin(), kAllMethods.end()};
  double shrinkage = 0.5;

  void validate() const;
};

struct EnsembleStage {
  Method method = Method::kLM;
  double weight = 1.0;  // 1, or 0 when the stage would have raised training RMSE
  IdentificationResult fit;
  double train_rmse_before = 0.0;
  double train_rmse_after = 0.0;  // with this stage's weighted contribution applied
};

/// Stage-wise additive residual model. Every stage was fitted to what the
/// earlier stages left unexplained on the training set.
struct EnsembleModel {
  std::vector<EnsembleStage> stages;
  double shrinkage = 1.0;

  /// Sum over stages of weight * shrinkage * stage prediction.
  double predict(const CableEncoderModel& model, const DHChain& nominal,
                 const JointConfig& joints) const;

  /// The first `k` stages. Identical to fitting a k-stage ensemble because
  /// stage m only sees the residuals of stages 1..m-1.
  EnsembleModel truncated(std::size_t k) const;
};

/// Fits each base identifier in `options.order` to the running residual.
/// Throws Error naming the stage if a base identifier fails.
EnsembleModel boost_fit(const Dataset& train, const CableEncoderModel& model,
                        const DHChain& nominal, const EnsembleOptions& options,
                        const MethodSettings& settings);

double ensemble_predict(const EnsembleModel& ensemble, const CableEncoderModel& model,
                        const DHChain& nominal, const JointConfig& joints);

/// measured - nominal - ensemble prediction, per sample.
Eigen::VectorXd ensemble_residuals(const EnsembleModel& ensemble, const CableEncoderModel& model,
                                   const DHChain& nominal, const Dataset& data);

}  // namespace armcal
