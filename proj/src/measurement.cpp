#include "armcal/measurement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "armcal/errors.hpp"

namespace armcal {
namespace {

constexpr std::string_view kCsvHeader =
    "theta1,theta2,theta3,theta4,theta5,theta6,measured_length";
constexpr std::size_t kCsvColumns = kJointCount + 1;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("failed to format number");
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

void CableEncoderModel::validate() const {
  if (!anchor.allFinite()) throw std::invalid_argument("encoder anchor must be finite");
  if (!std::isfinite(length_offset) || length_offset < 0.0) {
    throw std::invalid_argument("encoder length offset must be finite and >= 0");
  }
}

void Dataset::validate() const {
  if (samples.empty()) throw std::invalid_argument("dataset is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (!s.joints.allFinite() || !std::isfinite(s.measured_length) || s.measured_length <= 0.0) {
      throw std::invalid_argument("dataset sample " + std::to_string(i) + " is invalid");
    }
  }
}

DHChain default_nominal_chain() {
  constexpr double kHalfPi = M_PI / 2.0;
  return DHChain({
      DHLink{100.0, 350.0, 0.0, -kHalfPi},
      DHLink{30.0, 60.0, -kHalfPi, kHalfPi},
      DHLink{80.0, 320.0, 0.0, -kHalfPi},
      DHLink{40.0, 50.0, 0.0, kHalfPi},
      DHLink{20.0, 280.0, 0.0, -kHalfPi},
      DHLink{60.0, 110.0, 0.0, 0.0},
  });
}

CableEncoderModel default_encoder() { return {Eigen::Vector3d(600.0, -400.0, 0.0), 0.0}; }

KinematicErrorVector draw_error_vector(std::uint64_t seed, double length_bound, double angle_bound) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  KinematicErrorVector x;
  for (std::size_t k = 0; k < kParameterCount; ++k) {
    x[k] = unit(rng) * (k < KinematicErrorVector::kTheta ? length_bound : angle_bound);
  }
  x[KinematicErrorVector::kAlpha + 5] = 0.0;
  return x;
}

KinematicErrorVector scale_to_rmse(const CableEncoderModel& model, const DHChain& nominal,
                                   const KinematicErrorVector& x, double target_rmse,
                                   const Dataset& reference) {
  if (!(target_rmse >= 0.0)) throw std::invalid_argument("target RMSE must be >= 0");
  const auto rmse_for = [&](const KinematicErrorVector& v) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(reference.size()));
    const DHChain perturbed = apply_errors(nominal, v);
    for (std::size_t i = 0; i < reference.size(); ++i) {
      const JointConfig& q = reference.samples[i].joints;
      d[static_cast<Eigen::Index>(i)] =
          nominal_cable_length(model, perturbed, q) - nominal_cable_length(model, nominal, q);
    }
    return std::sqrt(d.squaredNorm() / static_cast<double>(d.size()));
  };
  KinematicErrorVector scaled = x;
  // The map is nearly linear for mm-scale errors; a few fixed-point steps suffice.
  for (int i = 0; i < 6; ++i) {
    const double current = rmse_for(scaled);
    if (current == 0.0) throw std::invalid_argument("error vector has no effect on cable lengths");
    scaled = KinematicErrorVector(scaled.flat() * (target_rmse / current));
  }
  return scaled;
}

double non_geometric_disturbance(const JointConfig& joints) {
  return std::cos(3.0 * joints[1]) + 0.5 * std::sin(3.0 * (joints[1] + joints[2]));
}

double nominal_cable_length(const CableEncoderModel& model, const DHChain& chain,
                            const JointConfig& joints) {
  return (end_effector_position(chain, joints) - model.anchor).norm() + model.length_offset;
}

LengthJacobianRow cable_length_jacobian(const CableEncoderModel& model, const DHChain& chain,
                                        const JointConfig& joints) {
  const Eigen::Vector3d delta = end_effector_position(chain, joints) - model.anchor;
  const double dist = delta.norm();
  if (dist == 0.0) {
    throw NumericalError("cable length Jacobian undefined: tool coincides with encoder anchor");
  }
  return (delta / dist).transpose() * parameter_jacobian(chain, joints);
}

Dataset simulate_dataset(const CableEncoderModel& model, const DHChain& nominal,
                         const KinematicErrorVector& true_x, std::size_t n, double noise_sigma,
                         std::uint64_t seed, const SimulationOptions& options) {
  if (n == 0) throw std::invalid_argument("simulate_dataset: n must be >= 1");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
    throw std::invalid_argument("simulate_dataset: noise sigma must be >= 0");
  }
  if ((options.joint_upper.array() < options.joint_lower.array()).any()) {
    throw std::invalid_argument("simulate_dataset: joint upper bound below lower bound");
  }
  model.validate();

  const DHChain actual = apply_errors(nominal, true_x);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset out;
  out.seed = seed;
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    for (Eigen::Index j = 0; j < 6; ++j) {
      s.joints[j] = options.joint_lower[j] +
                    unit(rng) * (options.joint_upper[j] - options.joint_lower[j]);
    }
    s.measured_length = nominal_cable_length(model, actual, s.joints) +
                        options.disturbance_amplitude * non_geometric_disturbance(s.joints) +
                        noise_sigma * gauss(rng);
    out.samples.push_back(s);
  }
  return out;
}

Eigen::VectorXd residuals(const CableEncoderModel& model, const DHChain& chain,
                          const Dataset& dataset) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(dataset.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Sample& s = dataset.samples[i];
    r[static_cast<Eigen::Index>(i)] =
        s.measured_length - nominal_cable_length(model, chain, s.joints);
  }
  return r;
}

std::string dataset_to_csv(const Dataset& dataset) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const Sample& s : dataset.samples) {
    for (Eigen::Index j = 0; j < 6; ++j) out += format_double(s.joints[j]) + ',';
    out += format_double(s.measured_length) + '\n';
  }
  return out;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << dataset_to_csv(dataset);
  if (!out) throw Error("failed writing " + path.string());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open dataset file");

  Dataset out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!header_seen) {
      if (view != kCsvHeader) {
        throw ParseError(path.string(), line_no,
                         "expected header '" + std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }

    const auto fields = static_cast<std::size_t>(std::count(view.begin(), view.end(), ',')) + 1;
    if (fields != kCsvColumns) {
      throw ParseError(path.string(), line_no,
                       "expected " + std::to_string(kCsvColumns) + " columns, got " +
                           std::to_string(fields));
    }
    std::array<double, kCsvColumns> values{};
    std::string_view rest = view;
    for (std::size_t column = 0; column < kCsvColumns; ++column) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[column]);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(path.string(), line_no,
                         "column " + std::to_string(column + 1) + " is not a number: '" +
                             std::string(field) + "'");
      }
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }

    Sample s;
    for (Eigen::Index j = 0; j < 6; ++j) s.joints[j] = values[static_cast<std::size_t>(j)];
    s.measured_length = values[kJointCount];
    if (!s.joints.allFinite() || !std::isfinite(s.measured_length) || s.measured_length <= 0.0) {
      throw ParseError(path.string(), line_no, "sample values must be finite with length > 0");
    }
    out.samples.push_back(s);
  }
  if (!header_seen) throw ParseError(path.string(), 0, "missing CSV header");
  if (out.samples.empty()) throw ParseError(path.string(), 0, "dataset contains no samples");
  return out;
}

}  // namespace armcal
