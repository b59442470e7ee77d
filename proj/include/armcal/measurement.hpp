#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "armcal/kinematics.hpp"

namespace armcal {

/// Drawstring encoder fixed in the base frame. The reading is the Euclidean
/// distance from `anchor` to the tool origin plus a constant `length_offset`.
struct CableEncoderModel {
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
  double length_offset = 0.0;

  /// Throws std::invalid_argument on a non-finite anchor or negative offset.
  void validate() const;
};

struct Sample {
  JointConfig joints = JointConfig::Zero();
  double measured_length = 0.0;  // mm

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  std::optional<std::uint64_t> seed;  // set only for simulated data

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  /// Throws std::invalid_argument if empty or any sample is invalid.
  void validate() const;
};

/// Smooth joint-dependent length disturbance used to emulate errors the DH
/// model cannot express (transmission/compliance effects):
/// cos(3 q2) + 0.5 sin(3 (q2 + q3)),
/// scaled by the caller-provided amplitude.
double non_geometric_disturbance(const JointConfig& joints);

struct SimulationOptions {
  Vector6d joint_lower = Vector6d::Constant(-M_PI / 4.0);
  Vector6d joint_upper = Vector6d::Constant(M_PI / 4.0);
  double disturbance_amplitude = 0.0;  // mm, multiplies non_geometric_disturbance()
};

/// Six-axis arm with alternating +-90 deg twists and link dimensions of
/// 20-350 mm. No two consecutive joint axes are parallel, so every parameter
/// except dalpha_6 is observable from cable lengths.
DHChain default_nominal_chain();

/// Anchor off the base z axis, so base rotation errors change cable lengths.
CableEncoderModel default_encoder();

/// Uniform draw with |da|, |dd| <= length_bound and |dtheta|, |dalpha| <=
/// angle_bound. dalpha_6 is left at zero: it never moves the tool origin.
KinematicErrorVector draw_error_vector(std::uint64_t seed, double length_bound, double angle_bound);

/// Rescales `x` so the noiseless length RMSE it causes over `reference`
/// configurations equals `target_rmse` (mm).
KinematicErrorVector scale_to_rmse(const CableEncoderModel& model, const DHChain& nominal,
                                   const KinematicErrorVector& x, double target_rmse,
                                   const Dataset& reference);

double nominal_cable_length(const CableEncoderModel& model, const DHChain& chain,
                            const JointConfig& joints);

/// d(length)/d(parameters): the unit anchor-to-tool direction applied to the
/// position Jacobian.
LengthJacobianRow cable_length_jacobian(const CableEncoderModel& model, const DHChain& chain,
                                        const JointConfig& joints);

/// Draws `n` configurations uniformly inside the joint ranges and measures
/// them on the chain `nominal + true_x` with i.i.d. Gaussian noise.
Dataset simulate_dataset(const CableEncoderModel& model, const DHChain& nominal,
                         const KinematicErrorVector& true_x, std::size_t n, double noise_sigma,
                         std::uint64_t seed, const SimulationOptions& options = {});

/// measured_length - nominal_cable_length, per sample.
Eigen::VectorXd residuals(const CableEncoderModel& model, const DHChain& chain,
                          const Dataset& dataset);

/// CSV with header `theta1,...,theta6,measured_length`. Values are written in
/// shortest round-trip form, so read(write(d)) reproduces every double.
std::string dataset_to_csv(const Dataset& dataset);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace armcal
