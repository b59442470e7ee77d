#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "armcal/errors.hpp"
#include "armcal/kinematics.hpp"
#include "armcal/measurement.hpp"
#include "armcal/svm.hpp"

namespace armcal {

using Matrix24d = Eigen::Matrix<double, 24, 24>;

/// The eight base identifiers.
enum class Method { kEKF, kLM, kPF, kSVM, kGA, kEPF, kLMGA, kSGA };

inline constexpr std::array<Method, 8> kAllMethods = {
    Method::kEKF, Method::kLM,  Method::kPF,   Method::kSVM,
    Method::kGA,  Method::kEPF, Method::kLMGA, Method::kSGA};

std::string_view method_name(Method m);
/// Case-insensitive. Throws std::invalid_argument listing the valid names.
Method parse_method(std::string_view name);
std::string valid_method_names();

/// Filter health recorded while an identifier runs.
struct FilterDiagnostics {
  std::vector<double> weight_sums;  // sum of normalised particle weights, per iteration
  std::vector<double> effective_sample_sizes;
  double min_covariance_eigenvalue = std::numeric_limits<double>::infinity();
  double max_covariance_asymmetry = 0.0;
  std::size_t covariance_checks = 0;
};

struct IdentificationResult {
  Method method = Method::kLM;
  std::optional<KinematicErrorVector> x_hat;
  std::optional<ResidualNetwork> residual_predictor;
  std::vector<double> history;  // training RMSE (mm); element 0 is before any update
  std::size_t iterations = 0;
  FilterDiagnostics diagnostics;

  /// Predicted (measured - nominal) length for one configuration: the length
  /// change produced by x_hat plus the network output, when present.
  double predict_residual(const CableEncoderModel& model, const DHChain& nominal,
                          const JointConfig& joints) const;
};

/// measured - nominal - predicted correction, per sample.
Eigen::VectorXd corrected_residuals(const IdentificationResult& result,
                                    const CableEncoderModel& model, const DHChain& nominal,
                                    const Dataset& data);

double rms(const Eigen::VectorXd& v);

// --------------------------------------------------------------------------
// Extended Kalman filter

struct EKFConfig {
  Matrix24d p0 = Matrix24d::Identity();
  Matrix24d q = Matrix24d::Zero();
  double r = 0.01;  // length-measurement variance, mm^2
  std::size_t passes = 3;
  bool track_covariance = false;  // record eigenvalue/symmetry checks after every update

  /// Diagonal P0 and Q with one value for length parameters (a, d; mm^2) and
  /// one for angular parameters (theta, alpha; rad^2).
  static EKFConfig diagonal(double p0_length, double p0_angle, double q_length, double q_angle,
                            double r, std::size_t passes);
  void validate() const;
};

/// One measurement update with a scalar observation z = j x + e, var(e) = r.
/// Returns the innovation variance. Throws NumericalError when it is not
/// strictly positive and finite. P is symmetrised afterwards.
template <int N>
double kalman_update(Eigen::Matrix<double, N, 1>& x, Eigen::Matrix<double, N, N>& p,
                     const Eigen::Matrix<double, 1, N>& j, double z, double r) {
  const Eigen::Matrix<double, N, 1> pj = p * j.transpose();
  const double s = j.dot(pj) + r;
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw NumericalError("singular innovation covariance");
  }
  const Eigen::Matrix<double, N, 1> gain = pj / s;
  x += gain * (z - j.dot(x));
  p -= gain * j * p;
  p = 0.5 * (p + p.transpose()).eval();
  return s;
}

IdentificationResult ekf_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const EKFConfig& cfg);

// --------------------------------------------------------------------------
// Levenberg-Marquardt

struct LMConfig {
  double lambda = 0.01;
  std::size_t iterations = 20;
  double step_tolerance = 1e-10;
  KinematicErrorVector initial;

  void validate() const;
};

/// Damped least-squares increment (J^T J + lambda I)^-1 J^T e. With lambda = 0
/// and a rank-deficient J this throws NumericalError.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual,
                        double lambda);

/// Iterated damped Gauss-Newton. A step that would raise the training RMSE is
/// rejected and retried with lambda x10, so the returned RMSE never exceeds the
/// starting one.
IdentificationResult lm_identify(const Dataset& data, const CableEncoderModel& model,
                                 const DHChain& nominal, const LMConfig& cfg);

// --------------------------------------------------------------------------
// Particle filter

struct PFConfig {
  std::size_t n_particles = 500;
  Vector24d prior_mean = Vector24d::Zero();
  Vector24d prior_sigma = Vector24d::Constant(1e-3);
  Vector24d diffusion_sigma = Vector24d::Zero();  // per-iteration random walk
  double diffusion_decay = 1.0;  // diffusion multiplied by this after every iteration
  double r = 0.01;               // weighting variance of each length residual, mm^2
  std::size_t iterations = 30;
  double resample_threshold = 0.5;  // resample when ESS < threshold * N
  std::uint64_t seed = 1;

  /// Same sigma for every length parameter and every angular parameter.
  static Vector24d grouped(double length, double angle);
  void validate() const;
};

/// Systematic resampling. `weights` must be normalised; `offset` in [0, 1)
/// is the single uniform draw. Returns the selected indices in ascending order.
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, double offset);

IdentificationResult pf_identify(const Dataset& data, const CableEncoderModel& model,
                                 const DHChain& nominal, const PFConfig& cfg);

/// Particle filter whose particles each take an EKF pass over the training
/// samples (own covariance, seeded from the EKF config) before weighting.
struct EPFConfig {
  PFConfig pf;
  EKFConfig ekf;  // `passes` EKF sweeps per particle per iteration

  void validate() const;
};

IdentificationResult epf_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const EPFConfig& cfg);

// --------------------------------------------------------------------------
// Genetic algorithm

struct GAConfig {
  std::size_t population = 100;
  std::size_t generations = 200;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  Vector24d mutation_sigma = PFConfig::grouped(0.2, 1e-3);
  double mutation_decay = 0.99;  // sigma multiplier per generation
  Vector24d lower = PFConfig::grouped(-2.0, -0.01);
  Vector24d upper = PFConfig::grouped(2.0, 0.01);
  std::size_t elitism = 2;
  std::uint64_t seed = 1;
  /// Placed in the initial population before random individuals (clamped).
  std::vector<KinematicErrorVector> initial_individuals;

  static constexpr std::size_t kTournamentSize = 3;
  static constexpr double kBlendAlpha = 0.5;

  void validate() const;
};

/// Real-coded GA minimising the mean squared length residual. Zero
/// generations performs no search and returns the centre of the bounds.
/// history holds the best-so-far RMSE per generation.
IdentificationResult ga_identify(const Dataset& data, const CableEncoderModel& model,
                                 const DHChain& nominal, const GAConfig& cfg);

// --------------------------------------------------------------------------
// Network-based and hybrid identifiers

/// Network fitted to the nominal-chain residuals; no geometric estimate.
IdentificationResult svm_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const SVMConfig& cfg);

struct LMGAConfig {
  GAConfig ga;
  LMConfig lm;
};

/// GA search, then LM started from the GA best individual.
IdentificationResult lmga_identify(const Dataset& data, const CableEncoderModel& model,
                                   const DHChain& nominal, const LMGAConfig& cfg);

struct SGAConfig {
  GAConfig ga;
  SVMConfig svm;
};

/// GA geometric estimate, then a network fitted to what the corrected chain
/// leaves unexplained. The network is dropped if it raises training RMSE.
IdentificationResult sga_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const SGAConfig& cfg);

// --------------------------------------------------------------------------

/// Configuration for every method, as loaded from a run configuration.
/// Defaults are tuned for mm-scale errors and 0.1 mm measurement noise.
struct MethodSettings {
  MethodSettings();

  EKFConfig ekf;
  LMConfig lm;
  PFConfig pf;
  SVMConfig svm;
  GAConfig ga;
  EPFConfig epf;
  LMGAConfig lmga;
  SGAConfig sga;
};

IdentificationResult identify(Method method, const Dataset& data, const CableEncoderModel& model,
                              const DHChain& nominal, const MethodSettings& settings);

}  // namespace armcal
