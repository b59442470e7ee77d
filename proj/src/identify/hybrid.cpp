#include "internal.hpp"

namespace armcal {

IdentificationResult svm_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const SVMConfig& cfg) {
  data.validate();
  model.validate();
  const Eigen::VectorXd targets = residuals(model, nominal, data);
  const std::vector<JointConfig> joints = detail::joints_of(data);

  IdentificationResult result;
  result.method = Method::kSVM;
  result.residual_predictor = svm_fit(joints, targets, cfg);
  result.iterations = cfg.epochs;
  result.history = {rms(targets), rms(targets - result.residual_predictor->predict(joints))};
  return result;
}

IdentificationResult lmga_identify(const Dataset& data, const CableEncoderModel& model,
                                   const DHChain& nominal, const LMGAConfig& cfg) {
  const IdentificationResult ga = ga_identify(data, model, nominal, cfg.ga);
  LMConfig lm_cfg = cfg.lm;
  lm_cfg.initial = *ga.x_hat;
  const IdentificationResult lm = lm_identify(data, model, nominal, lm_cfg);

  IdentificationResult result;
  result.method = Method::kLMGA;
  result.x_hat = lm.x_hat;
  result.history = ga.history;
  result.history.insert(result.history.end(), lm.history.begin() + 1, lm.history.end());
  result.iterations = ga.iterations + lm.iterations;
  return result;
}

IdentificationResult sga_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const SGAConfig& cfg) {
  const IdentificationResult ga = ga_identify(data, model, nominal, cfg.ga);
  const Eigen::VectorXd leftover = residuals(model, apply_errors(nominal, *ga.x_hat), data);
  const std::vector<JointConfig> joints = detail::joints_of(data);
  ResidualNetwork net = svm_fit(joints, leftover, cfg.svm);
  const double before = rms(leftover);
  const double after = rms(leftover - net.predict(joints));

  IdentificationResult result;
  result.method = Method::kSGA;
  result.x_hat = ga.x_hat;
  result.history = ga.history;
  result.iterations = ga.iterations + cfg.svm.epochs;
  if (after <= before) {
    result.residual_predictor = std::move(net);
    result.history.push_back(after);
  } else {
    result.history.push_back(before);
  }
  return result;
}

}  // namespace armcal
