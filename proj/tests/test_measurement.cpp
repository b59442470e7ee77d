#include <doctest.h>

#include <cmath>
#include <random>

#include "armcal/errors.hpp"
#include "armcal/measurement.hpp"
#include "support.hpp"

using namespace armcal;

namespace {

DHChain single_link(double a, double d) {
  std::vector<DHLink> links(6);
  links[0] = {a, d, 0, 0};
  return DHChain::from_links(links);
}

}  // namespace

TEST_CASE("nominal cable length") {
  CableEncoderModel m;
  SUBCASE("3-4-5 triangle") {
    // tool at (3, 4, 0): a = 5 along x rotated so x = 3, y = 4
    JointConfig q = JointConfig::Zero();
    q[0] = std::atan2(4.0, 3.0);
    CHECK(nominal_cable_length(m, single_link(5.0, 0.0), q) == doctest::Approx(5.0).epsilon(1e-14));
  }
  SUBCASE("anchor at the tool gives the offset") {
    const DHChain c = default_nominal_chain();
    JointConfig q;
    q << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6;
    m.anchor = end_effector_position(c, q);
    m.length_offset = 12.5;
    CHECK(nominal_cable_length(m, c, q) == doctest::Approx(12.5).epsilon(1e-9));
  }
  SUBCASE("matches a componentwise distance") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const CableEncoderModel enc = default_encoder();
    const DHChain c = default_nominal_chain();
    for (int i = 0; i < 20; ++i) {
      JointConfig q;
      for (int j = 0; j < 6; ++j) q[j] = u(rng);
      const Eigen::Vector3d p = end_effector_position(c, q);
      const double dx = p.x() - enc.anchor.x(), dy = p.y() - enc.anchor.y(), dz = p.z() - enc.anchor.z();
      CHECK(std::abs(nominal_cable_length(enc, c, q) - (std::sqrt(dx * dx + dy * dy + dz * dz) + enc.length_offset)) < 1e-12);
    }
  }
  SUBCASE("invalid encoder") {
    m.length_offset = -1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  }
}

TEST_CASE("cable length jacobian is the projected position jacobian") {
  const CableEncoderModel enc = default_encoder();
  const DHChain c = default_nominal_chain();
  JointConfig q;
  q << 0.3, -0.2, 0.1, 0.5, -0.4, 0.2;
  const auto row = cable_length_jacobian(enc, c, q);
  const double h = 1e-6;
  for (std::size_t k = 0; k < kParameterCount; ++k) {
    KinematicErrorVector plus, minus;
    plus[k] = h;
    minus[k] = -h;
    const double fd = (nominal_cable_length(enc, apply_errors(c, plus), q) -
                       nominal_cable_length(enc, apply_errors(c, minus), q)) / (2 * h);
    CHECK(row[static_cast<Eigen::Index>(k)] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("simulation") {
  const CableEncoderModel enc = default_encoder();
  const DHChain c = default_nominal_chain();

  SUBCASE("unperturbed noiseless data has zero residuals") {
    const Dataset d = simulate_dataset(enc, c, {}, 50, 0.0, 1);
    CHECK(residuals(enc, c, d).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.seed == 1u);
  }
  SUBCASE("the true chain explains noiseless data") {
    const KinematicErrorVector x = draw_error_vector(3, 1.0, 0.005);
    const Dataset d = simulate_dataset(enc, c, x, 50, 0.0, 2);
    CHECK(residuals(enc, apply_errors(c, x), d).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(residuals(enc, c, d).cwiseAbs().maxCoeff() > 0.1);
  }
  SUBCASE("same seed, same data") {
    const Dataset a = simulate_dataset(enc, c, {}, 30, 0.1, 9);
    const Dataset b = simulate_dataset(enc, c, {}, 30, 0.1, 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.samples[i].joints == b.samples[i].joints);
      CHECK(a.samples[i].measured_length == b.samples[i].measured_length);
    }
  }
  SUBCASE("noise level") {
    const Dataset d = simulate_dataset(enc, c, {}, 1000, 0.1, 4);
    const Eigen::VectorXd r = residuals(enc, c, d);
    const double mean = r.mean();
    const double sd = std::sqrt((r.array() - mean).square().sum() / (r.size() - 1));
    CHECK(sd >= 0.08);
    CHECK(sd <= 0.12);
  }
  SUBCASE("joints stay in range") {
    SimulationOptions o;
    o.joint_lower.setConstant(-0.1);
    o.joint_upper.setConstant(0.2);
    const Dataset d = simulate_dataset(enc, c, {}, 200, 0.0, 5, o);
    for (const Sample& s : d.samples) {
      CHECK(s.joints.minCoeff() >= -0.1);
      CHECK(s.joints.maxCoeff() <= 0.2);
    }
  }
  SUBCASE("disturbance adds the documented function") {
    SimulationOptions o;
    o.disturbance_amplitude = 0.7;
    const Dataset d = simulate_dataset(enc, c, {}, 20, 0.0, 6, o);
    const Eigen::VectorXd r = residuals(enc, c, d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const JointConfig& q = d.samples[i].joints;
      const double expected = 0.7 * (std::cos(3 * q[1]) + 0.5 * std::sin(3 * (q[1] + q[2])));
      CHECK(r[static_cast<Eigen::Index>(i)] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(simulate_dataset(enc, c, {}, 0, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_dataset(enc, c, {}, 5, -0.1, 1), std::invalid_argument);
  }
}

TEST_CASE("error draws and scaling") {
  const KinematicErrorVector x = draw_error_vector(7, 1.0, 0.005);
  CHECK(x.delta_a().cwiseAbs().maxCoeff() <= 1.0);
  CHECK(x.delta_d().cwiseAbs().maxCoeff() <= 1.0);
  CHECK(x.delta_theta().cwiseAbs().maxCoeff() <= 0.005);
  CHECK(x.delta_alpha().cwiseAbs().maxCoeff() <= 0.005);
  CHECK(x.delta_alpha()[5] == 0.0);
  CHECK(draw_error_vector(7, 1.0, 0.005) == x);

  const Dataset poses = simulate_dataset(default_encoder(), default_nominal_chain(), {}, 60, 0.0, 3);
  const KinematicErrorVector scaled =
      scale_to_rmse(default_encoder(), default_nominal_chain(), x, 2.09, poses);
  const Dataset measured = simulate_dataset(default_encoder(), default_nominal_chain(), scaled, 60, 0.0, 3);
  const Eigen::VectorXd r = residuals(default_encoder(), default_nominal_chain(), measured);
  CHECK(std::sqrt(r.squaredNorm() / r.size()) == doctest::Approx(2.09).epsilon(1e-6));
}

TEST_CASE("residuals by definition") {
  const CableEncoderModel enc = default_encoder();
  const DHChain c = default_nominal_chain();
  Dataset d;
  JointConfig q;
  q << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  d.samples.push_back({q, nominal_cable_length(enc, c, q) + 2.5});
  const Eigen::VectorXd r = residuals(enc, c, d);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(2.5).epsilon(1e-12));

  const Dataset s = simulate_dataset(enc, c, draw_error_vector(1, 1, 0.005), 25, 0.1, 1);
  const Eigen::VectorXd rs = residuals(enc, c, s);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(rs[static_cast<Eigen::Index>(i)] ==
          s.samples[i].measured_length - nominal_cable_length(enc, c, s.samples[i].joints));
}

TEST_CASE("dataset csv") {
  TempDir dir;
  const Dataset d = simulate_dataset(default_encoder(), default_nominal_chain(),
                                     draw_error_vector(2, 1, 0.005), 40, 0.1, 12);

  SUBCASE("round trip is exact") {
    write_dataset_csv(dir / "d.csv", d);
    const Dataset back = read_dataset_csv(dir / "d.csv");
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(back.samples[i].joints == d.samples[i].joints);
      CHECK(back.samples[i].measured_length == d.samples[i].measured_length);
    }
    CHECK(read_file(dir / "d.csv") == dataset_to_csv(d));
  }
  SUBCASE("wrong column count names the line") {
    write_file(dir / "bad.csv",
               "theta1,theta2,theta3,theta4,theta5,theta6,measured_length\n"
               "0,0,0,0,0,0,1000\n"
               "0,0,0,0,1000\n");
    try {
      read_dataset_csv(dir / "bad.csv");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }
  SUBCASE("non-numeric field") {
    write_file(dir / "bad.csv",
               "theta1,theta2,theta3,theta4,theta5,theta6,measured_length\n0,0,x,0,0,0,1000\n");
    CHECK_THROWS_AS(read_dataset_csv(dir / "bad.csv"), ParseError);
  }
  SUBCASE("header only") {
    write_file(dir / "empty.csv", "theta1,theta2,theta3,theta4,theta5,theta6,measured_length\n");
    CHECK_THROWS_WITH_AS(read_dataset_csv(dir / "empty.csv"),
                         doctest::Contains("no samples"), ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_dataset_csv(dir / "nope.csv"), ParseError);
  }
}
