#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace armcal {

inline constexpr std::size_t kJointCount = 6;
inline constexpr std::size_t kParameterCount = 4 * kJointCount;

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector24d = Eigen::Matrix<double, 24, 1>;
using JointConfig = Vector6d;  // joint angles in rad, added to each link's theta offset
using ParameterJacobian = Eigen::Matrix<double, 3, 24>;
using LengthJacobianRow = Eigen::Matrix<double, 1, 24>;

/// Standard Denavit-Hartenberg link: Rot(z, theta) Trans(z, d) Trans(x, a) Rot(x, alpha).
/// Lengths in mm, angles in rad.
struct DHLink {
  double a = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double alpha = 0.0;

  bool operator==(const DHLink&) const = default;
};

/// Six-link serial chain.
class DHChain {
 public:
  DHChain() = default;
  explicit DHChain(const std::array<DHLink, kJointCount>& links);

  /// Throws std::invalid_argument unless `links` has exactly six finite entries.
  static DHChain from_links(std::span<const DHLink> links);

  const std::array<DHLink, kJointCount>& links() const noexcept { return links_; }
  const DHLink& operator[](std::size_t i) const { return links_[i]; }

  bool operator==(const DHChain&) const = default;

 private:
  std::array<DHLink, kJointCount> links_{};
};

/// Rigid transform with an orthonormal rotation block.
struct HomogeneousTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static HomogeneousTransform identity() { return {}; }
  static HomogeneousTransform from_matrix(const Eigen::Matrix4d& m);

  Eigen::Matrix4d matrix() const;
  HomogeneousTransform operator*(const HomogeneousTransform& rhs) const;
};

/// Kinematic parameter errors, stored flat as
/// (da_1..da_6, dd_1..dd_6, dtheta_1..dtheta_6, dalpha_1..dalpha_6).
class KinematicErrorVector {
 public:
  static constexpr std::size_t kA = 0;
  static constexpr std::size_t kD = 6;
  static constexpr std::size_t kTheta = 12;
  static constexpr std::size_t kAlpha = 18;

  KinematicErrorVector() : values_(Vector24d::Zero()) {}
  explicit KinematicErrorVector(const Vector24d& flat) : values_(flat) {}

  static KinematicErrorVector zero() { return {}; }

  auto delta_a() { return values_.segment<6>(kA); }
  auto delta_d() { return values_.segment<6>(kD); }
  auto delta_theta() { return values_.segment<6>(kTheta); }
  auto delta_alpha() { return values_.segment<6>(kAlpha); }
  auto delta_a() const { return values_.segment<6>(kA); }
  auto delta_d() const { return values_.segment<6>(kD); }
  auto delta_theta() const { return values_.segment<6>(kTheta); }
  auto delta_alpha() const { return values_.segment<6>(kAlpha); }

  const Vector24d& flat() const noexcept { return values_; }
  Vector24d& flat() noexcept { return values_; }

  double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }
  double& operator[](std::size_t k) { return values_[static_cast<Eigen::Index>(k)]; }

  KinematicErrorVector operator-() const { return KinematicErrorVector(-values_); }
  KinematicErrorVector operator+(const KinematicErrorVector& o) const {
    return KinematicErrorVector(values_ + o.values_);
  }
  bool operator==(const KinematicErrorVector& o) const { return values_ == o.values_; }

 private:
  Vector24d values_;
};

/// Human-readable name of flat parameter index k, e.g. "dtheta3".
std::string parameter_name(std::size_t k);

HomogeneousTransform link_transform(const DHLink& link, double joint_angle);

HomogeneousTransform forward_kinematics(const DHChain& chain, const JointConfig& joints);

/// End-effector position (translation of the base-to-tool transform), mm.
Eigen::Vector3d end_effector_position(const DHChain& chain, const JointConfig& joints);

/// Partial derivatives of the end-effector position with respect to every DH
/// parameter. Each column is T_{0,i-1} * dA_i/dq * T_{i,6} applied to the
/// tool origin, where dA_i/dq is the closed-form derivative of the link matrix.
ParameterJacobian parameter_jacobian(const DHChain& chain, const JointConfig& joints);

DHChain apply_errors(const DHChain& chain, const KinematicErrorVector& x);

}  // namespace armcal
