#include <doctest.h>

#include <cmath>
#include <random>

#include "armcal/errors.hpp"
#include "armcal/svm.hpp"

using namespace armcal;

namespace {

struct Problem {
  std::vector<JointConfig> joints;
  Eigen::VectorXd targets;
};

Problem smooth_problem(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  Problem p;
  p.targets.resize(n);
  for (int i = 0; i < n; ++i) {
    JointConfig q;
    for (int j = 0; j < 6; ++j) q[j] = u(rng);
    p.joints.push_back(q);
    p.targets[i] = std::sin(2 * q[1]) + 0.5 * q[0] * q[2];
  }
  return p;
}

ResidualNetwork random_network(std::mt19937_64& rng, Eigen::Index hidden, Eigen::Index refs) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd r(refs, 6), w1(hidden, refs);
  Eigen::VectorXd mean(refs), scale(refs), b1(hidden), w2(hidden);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < refs; ++i) {
    mean[i] = n(rng);
    scale[i] = 0.5 + std::abs(n(rng));
  }
  for (Eigen::Index i = 0; i < hidden; ++i) {
    b1[i] = n(rng);
    w2[i] = n(rng);
  }
  return ResidualNetwork(r, mean, scale, w1, b1, w2, n(rng));
}

}  // namespace

TEST_CASE("zero weights predict the output bias") {
  Eigen::MatrixXd refs = Eigen::MatrixXd::Ones(3, 6);
  ResidualNetwork net(refs, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3),
                      Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Constant(4, 0.7),
                      Eigen::VectorXd::Zero(4), 1.25);
  JointConfig q;
  q << 0.3, -1, 2, 0, 0.5, 9;
  CHECK(net.predict(q) == 1.25);
  CHECK(net.predict(JointConfig::Zero()) == 1.25);
}

TEST_CASE("single hidden unit by hand") {
  Eigen::MatrixXd refs(1, 6);
  refs << 0.4, 0, 0, 0, 0, 0;
  Eigen::MatrixXd w1(1, 1);
  w1 << 0.5;
  ResidualNetwork net(refs, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), w1,
                      Eigen::VectorXd::Constant(1, 0.1), Eigen::VectorXd::Constant(1, 2.0), -0.3);
  JointConfig q = JointConfig::Zero();
  q[0] = 1.0;
  // k = 0.4, h1 = 0.5 * 0.4 + 0.1 = 0.3, logistic(0.3) = 0.574442516811659
  CHECK(net.predict(q) == doctest::Approx(2.0 * 0.574442516811659 - 0.3).epsilon(1e-14));
}

TEST_CASE("kernel features are standardised inner products") {
  std::mt19937_64 rng(3);
  const ResidualNetwork net = random_network(rng, 3, 4);
  JointConfig q;
  q << 0.1, 0.2, -0.3, 0.4, 0.5, -0.6;
  const std::vector<JointConfig> qs{q};
  const Eigen::MatrixXd f = net.features(qs);
  for (Eigen::Index j = 0; j < 4; ++j) {
    double dot = 0.0;
    for (int i = 0; i < 6; ++i) dot += q[i] * net.references()(j, i);
    CHECK(f(0, j) == doctest::Approx((dot - net.feature_mean()[j]) / net.feature_scale()[j]));
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(11);
  const Problem p = smooth_problem(25, 2);
  for (int point = 0; point < 20; ++point) {
    ResidualNetwork net = random_network(rng, 5, 7);
    const double lambda1 = 0.01 * (point % 4);
    const Eigen::MatrixXd f = net.features(p.joints);
    const Eigen::VectorXd g = ResidualNetwork::flatten(net.gradient(f, p.targets, lambda1));
    const Eigen::VectorXd theta = net.parameters();
    Eigen::VectorXd fd(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      Eigen::VectorXd t = theta;
      t[k] += 1e-6;
      net.set_parameters(t);
      const double up = net.loss(f, p.targets, lambda1);
      t[k] -= 2e-6;
      net.set_parameters(t);
      fd[k] = (up - net.loss(f, p.targets, lambda1)) / 2e-6;
    }
    net.set_parameters(theta);
    CHECK((g - fd).norm() / fd.norm() < 1e-4);
  }
}

TEST_CASE("parameter vector round trip and layout") {
  std::mt19937_64 rng(12);
  ResidualNetwork net = random_network(rng, 3, 2);
  const Eigen::VectorXd theta = net.parameters();
  CHECK(theta.size() == 3 * 2 + 3 + 3 + 1);
  CHECK(theta[1] == net.w1()(0, 1));  // row-major W1
  CHECK(theta[theta.size() - 1] == net.b2());
  net.set_parameters(theta * 2.0);
  CHECK(net.parameters() == theta * 2.0);
  CHECK_THROWS_AS(net.set_parameters(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("constructor rejects inconsistent shapes") {
  CHECK_THROWS_AS(ResidualNetwork(Eigen::MatrixXd::Zero(2, 6), Eigen::VectorXd::Zero(2),
                                  Eigen::VectorXd::Ones(2), Eigen::MatrixXd::Zero(3, 4),
                                  Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), 0.0),
                  std::invalid_argument);
}

TEST_CASE("training") {
  const Problem p = smooth_problem(80, 5);
  SVMConfig cfg;
  SUBCASE("fits a smooth function and is deterministic") {
    const ResidualNetwork a = svm_fit(p.joints, p.targets, cfg);
    const ResidualNetwork b = svm_fit(p.joints, p.targets, cfg);
    CHECK(a.parameters() == b.parameters());
    const Eigen::VectorXd pred = a.predict(p.joints);
    const double before = std::sqrt(p.targets.squaredNorm() / 80);
    const double after = std::sqrt((p.targets - pred).squaredNorm() / 80);
    CHECK(after < 0.2 * before);
    CHECK(a.hidden_width() == cfg.hidden_width);
  }
  SUBCASE("zero epochs with zero output init predicts nothing") {
    cfg.epochs = 0;
    const ResidualNetwork net = svm_fit(p.joints, p.targets, cfg);
    CHECK(net.predict(p.joints).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("validation split still returns a usable network") {
    cfg.validation_fraction = 0.25;
    const ResidualNetwork net = svm_fit(p.joints, p.targets, cfg);
    CHECK(std::sqrt((p.targets - net.predict(p.joints)).squaredNorm() / 80) <
          std::sqrt(p.targets.squaredNorm() / 80));
  }
  SUBCASE("divergence is reported") {
    cfg.learning_rate = 1e6;
    cfg.momentum = 0.0;
    cfg.output_init_scale = 1.0;
    CHECK_THROWS_AS(svm_fit(p.joints, p.targets * 1e3, cfg), DivergedError);
  }
  SUBCASE("invalid input") {
    cfg.hidden_width = 0;
    CHECK_THROWS_AS(svm_fit(p.joints, p.targets, cfg), std::invalid_argument);
    cfg.hidden_width = 4;
    cfg.lambda1 = -1;
    CHECK_THROWS_AS(svm_fit(p.joints, p.targets, cfg), std::invalid_argument);
    cfg.lambda1 = 0;
    CHECK_THROWS_AS(svm_fit(p.joints, p.targets.head(10), cfg), std::invalid_argument);
  }
}
