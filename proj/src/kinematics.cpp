#include "armcal/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace armcal {
namespace {

bool finite(const DHLink& l) {
  return std::isfinite(l.a) && std::isfinite(l.d) && std::isfinite(l.theta_offset) &&
         std::isfinite(l.alpha);
}

void require_finite(const DHChain& chain) {
  for (const auto& l : chain.links()) {
    if (!finite(l)) throw std::invalid_argument("DH chain contains a non-finite parameter");
  }
}

void require_finite(const JointConfig& joints) {
  if (!joints.allFinite()) throw std::invalid_argument("joint configuration is not finite");
}

// Derivative of the link matrix with respect to one parameter, split into the
// rotation block and translation column (bottom row is always zero).
struct LinkDerivative {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
};

}  // namespace

DHChain::DHChain(const std::array<DHLink, kJointCount>& links) : links_(links) {
  for (const auto& l : links_) {
    if (!finite(l)) throw std::invalid_argument("DH link parameters must be finite");
  }
}

DHChain DHChain::from_links(std::span<const DHLink> links) {
  if (links.size() != kJointCount) {
    throw std::invalid_argument("DH chain needs exactly 6 links, got " +
                                std::to_string(links.size()));
  }
  std::array<DHLink, kJointCount> arr{};
  std::copy(links.begin(), links.end(), arr.begin());
  return DHChain(arr);
}

HomogeneousTransform HomogeneousTransform::from_matrix(const Eigen::Matrix4d& m) {
  HomogeneousTransform t;
  t.rotation = m.topLeftCorner<3, 3>();
  t.translation = m.topRightCorner<3, 1>();
  return t;
}

Eigen::Matrix4d HomogeneousTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

HomogeneousTransform HomogeneousTransform::operator*(const HomogeneousTransform& rhs) const {
  HomogeneousTransform out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

std::string parameter_name(std::size_t k) {
  static constexpr const char* kGroups[] = {"da", "dd", "dtheta", "dalpha"};
  if (k >= kParameterCount) throw std::out_of_range("parameter index out of range");
  return std::string(kGroups[k / kJointCount]) + std::to_string(k % kJointCount + 1);
}

HomogeneousTransform link_transform(const DHLink& link, double joint_angle) {
  if (!finite(link) || !std::isfinite(joint_angle)) {
    throw std::invalid_argument("link_transform: non-finite input");
  }
  const double theta = joint_angle + link.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(link.alpha), sa = std::sin(link.alpha);

  HomogeneousTransform t;
  t.rotation << ct, -st * ca, st * sa,
                st, ct * ca, -ct * sa,
                0.0, sa, ca;
  t.translation << link.a * ct, link.a * st, link.d;
  return t;
}

HomogeneousTransform forward_kinematics(const DHChain& chain, const JointConfig& joints) {
  require_finite(chain);
  require_finite(joints);
  HomogeneousTransform t;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    t = t * link_transform(chain[i], joints[static_cast<Eigen::Index>(i)]);
  }
  return t;
}

Eigen::Vector3d end_effector_position(const DHChain& chain, const JointConfig& joints) {
  return forward_kinematics(chain, joints).translation;
}

ParameterJacobian parameter_jacobian(const DHChain& chain, const JointConfig& joints) {
  require_finite(chain);
  require_finite(joints);

  std::array<HomogeneousTransform, kJointCount> links;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    links[i] = link_transform(chain[i], joints[static_cast<Eigen::Index>(i)]);
  }

  // tool[i]: tool origin expressed in frame i (frame 0 = base).
  std::array<Eigen::Vector3d, kJointCount + 1> tool;
  tool[kJointCount].setZero();
  for (std::size_t i = kJointCount; i-- > 0;) {
    tool[i] = links[i].rotation * tool[i + 1] + links[i].translation;
  }

  ParameterJacobian jac;
  Eigen::Matrix3d prefix = Eigen::Matrix3d::Identity();  // rotation of frame i in base
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const DHLink& l = chain[i];
    const double theta = joints[static_cast<Eigen::Index>(i)] + l.theta_offset;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(l.alpha), sa = std::sin(l.alpha);
    const Eigen::Vector3d& s = tool[i + 1];

    LinkDerivative d_a{Eigen::Matrix3d::Zero(), Eigen::Vector3d(ct, st, 0.0)};
    LinkDerivative d_d{Eigen::Matrix3d::Zero(), Eigen::Vector3d(0.0, 0.0, 1.0)};
    LinkDerivative d_theta;
    d_theta.rotation << -st, -ct * ca, ct * sa,
                         ct, -st * ca, st * sa,
                         0.0, 0.0, 0.0;
    d_theta.translation << -l.a * st, l.a * ct, 0.0;
    LinkDerivative d_alpha;
    d_alpha.rotation << 0.0, st * sa, st * ca,
                        0.0, -ct * sa, -ct * ca,
                        0.0, ca, -sa;
    d_alpha.translation.setZero();

    const auto column = [&](const LinkDerivative& dl) -> Eigen::Vector3d {
      return prefix * (dl.rotation * s + dl.translation);
    };
    jac.col(static_cast<Eigen::Index>(KinematicErrorVector::kA + i)) = column(d_a);
    jac.col(static_cast<Eigen::Index>(KinematicErrorVector::kD + i)) = column(d_d);
    jac.col(static_cast<Eigen::Index>(KinematicErrorVector::kTheta + i)) = column(d_theta);
    jac.col(static_cast<Eigen::Index>(KinematicErrorVector::kAlpha + i)) = column(d_alpha);

    prefix = prefix * links[i].rotation;
  }
  return jac;
}

DHChain apply_errors(const DHChain& chain, const KinematicErrorVector& x) {
  std::array<DHLink, kJointCount> links = chain.links();
  for (std::size_t i = 0; i < kJointCount; ++i) {
    links[i].a += x[KinematicErrorVector::kA + i];
    links[i].d += x[KinematicErrorVector::kD + i];
    links[i].theta_offset += x[KinematicErrorVector::kTheta + i];
    links[i].alpha += x[KinematicErrorVector::kAlpha + i];
  }
  return DHChain(links);
}

}  // namespace armcal
