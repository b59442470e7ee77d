#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "armcal/identify.hpp"

namespace armcal {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kEKF: return "ekf";
    case Method::kLM: return "lm";
    case Method::kPF: return "pf";
    case Method::kSVM: return "svm";
    case Method::kGA: return "ga";
    case Method::kEPF: return "epf";
    case Method::kLMGA: return "lmga";
    case Method::kSGA: return "sga";
  }
  return "unknown";
}

std::string valid_method_names() {
  std::string out;
  for (Method m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += method_name(m);
  }
  return out;
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Method m : kAllMethods) {
    if (method_name(m) == lower) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) +
                              "' (valid: " + valid_method_names() + ")");
}

MethodSettings::MethodSettings() {
  ekf = EKFConfig::diagonal(1.0, 2.5e-5, 0.0, 0.0, 0.01, 3);

  pf.n_particles = 500;
  pf.prior_sigma = PFConfig::grouped(1.0, 0.005);
  pf.diffusion_sigma = PFConfig::grouped(0.3, 0.0015);
  pf.diffusion_decay = 0.93;
  pf.r = 0.25;
  pf.iterations = 60;

  // Each particle is already pulled toward the data by its EKF sweep, so
  // far fewer particles and iterations are needed.
  epf.pf = pf;
  epf.pf.n_particles = 20;
  epf.pf.iterations = 3;
  epf.pf.diffusion_sigma = PFConfig::grouped(0.05, 0.0002);
  epf.ekf = ekf;
  epf.ekf.passes = 1;

  lmga.ga = ga;
  lmga.lm = lm;
  sga.ga = ga;
  sga.svm = svm;
}

double IdentificationResult::predict_residual(const CableEncoderModel& model,
                                              const DHChain& nominal,
                                              const JointConfig& joints) const {
  double out = 0.0;
  if (x_hat) {
    out += nominal_cable_length(model, apply_errors(nominal, *x_hat), joints) -
           nominal_cable_length(model, nominal, joints);
  }
  if (residual_predictor) out += residual_predictor->predict(joints);
  return out;
}

Eigen::VectorXd corrected_residuals(const IdentificationResult& result,
                                    const CableEncoderModel& model, const DHChain& nominal,
                                    const Dataset& data) {
  const DHChain chain = result.x_hat ? apply_errors(nominal, *result.x_hat) : nominal;
  Eigen::VectorXd r = residuals(model, chain, data);
  if (result.residual_predictor) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] -= result.residual_predictor->predict(data.samples[i].joints);
    }
  }
  return r;
}

double rms(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

IdentificationResult identify(Method method, const Dataset& data, const CableEncoderModel& model,
                              const DHChain& nominal, const MethodSettings& s) {
  switch (method) {
    case Method::kEKF: return ekf_identify(data, model, nominal, s.ekf);
    case Method::kLM: return lm_identify(data, model, nominal, s.lm);
    case Method::kPF: return pf_identify(data, model, nominal, s.pf);
    case Method::kSVM: return svm_identify(data, model, nominal, s.svm);
    case Method::kGA: return ga_identify(data, model, nominal, s.ga);
    case Method::kEPF: return epf_identify(data, model, nominal, s.epf);
    case Method::kLMGA: return lmga_identify(data, model, nominal, s.lmga);
    case Method::kSGA: return sga_identify(data, model, nominal, s.sga);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace armcal
