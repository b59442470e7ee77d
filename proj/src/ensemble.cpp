#include "armcal/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "identify/internal.hpp"

namespace armcal {

void EnsembleOptions::validate() const {
  if (order.empty()) throw std::invalid_argument("ensemble needs at least one stage");
  if (!(shrinkage > 0.0 && shrinkage <= 1.0)) {
    throw std::invalid_argument("ensemble shrinkage must lie in (0, 1]");
  }
}

double EnsembleModel::predict(const CableEncoderModel& model, const DHChain& nominal,
                              const JointConfig& joints) const {
  double sum = 0.0;
  for (const EnsembleStage& stage : stages) {
    if (stage.weight == 0.0) continue;
    sum += stage.weight * shrinkage * stage.fit.predict_residual(model, nominal, joints);
  }
  return sum;
}

EnsembleModel EnsembleModel::truncated(std::size_t k) const {
  EnsembleModel out;
  out.shrinkage = shrinkage;
  out.stages.assign(stages.begin(), stages.begin() + static_cast<std::ptrdiff_t>(std::min(k, stages.size())));
  return out;
}

EnsembleModel boost_fit(const Dataset& train, const CableEncoderModel& model,
                        const DHChain& nominal, const EnsembleOptions& options,
                        const MethodSettings& settings) {
  options.validate();
  train.validate();
  model.validate();

  EnsembleModel ensemble;
  ensemble.shrinkage = options.shrinkage;
  Eigen::VectorXd target = residuals(model, nominal, train);

  for (std::size_t m = 0; m < options.order.size(); ++m) {
    const Method method = options.order[m];
    EnsembleStage stage;
    stage.method = method;
    try {
      const Dataset stage_data = detail::with_targets(train, model, nominal, target);
      stage.fit = identify(method, stage_data, model, nominal, settings);
    } catch (const std::exception& e) {
      throw Error("ensemble stage " + std::to_string(m + 1) + " (" +
                  std::string(method_name(method)) + ") failed: " + e.what());
    }

    Eigen::VectorXd prediction(target.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      prediction[static_cast<Eigen::Index>(i)] =
          stage.fit.predict_residual(model, nominal, train.samples[i].joints);
    }
    const Eigen::VectorXd next = target - options.shrinkage * prediction;
    stage.train_rmse_before = rms(target);
    const double after = rms(next);
    if (std::isfinite(after) && after <= stage.train_rmse_before) {
      stage.weight = 1.0;
      stage.train_rmse_after = after;
      target = next;
    } else {
      stage.weight = 0.0;
      stage.train_rmse_after = stage.train_rmse_before;
    }
    ensemble.stages.push_back(std::move(stage));
  }
  return ensemble;
}

double ensemble_predict(const EnsembleModel& ensemble, const CableEncoderModel& model,
                        const DHChain& nominal, const JointConfig& joints) {
  return ensemble.predict(model, nominal, joints);
}

Eigen::VectorXd ensemble_residuals(const EnsembleModel& ensemble, const CableEncoderModel& model,
                                   const DHChain& nominal, const Dataset& data) {
  Eigen::VectorXd r = residuals(model, nominal, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] -= ensemble.predict(model, nominal, data.samples[i].joints);
  }
  return r;
}

}  // namespace armcal
