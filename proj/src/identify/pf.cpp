#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "internal.hpp"

namespace armcal {
namespace {

struct Particle {
  Vector24d x;
  Matrix24d p;  // used by the EKF-refined variant only
};

double log_likelihood(const Dataset& data, const CableEncoderModel& model, const DHChain& nominal,
                      const Vector24d& x, double r) {
  const double ssr = residuals(model, apply_errors(nominal, KinematicErrorVector(x)), data)
                         .squaredNorm();
  // Gaussian density with a diagonal covariance r*I over the residual vector;
  // the normalising constant is common to all particles and cancels.
  if (r == 0.0) return ssr == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -0.5 * ssr / r;
}

// Shared SIR loop; `refine` (may be empty) runs on each particle after
// diffusion and before weighting.
template <typename Refine>
IdentificationResult run_particle_filter(const Dataset& data, const CableEncoderModel& model,
                                         const DHChain& nominal, const PFConfig& cfg,
                                         const Matrix24d& initial_covariance, Refine&& refine) {
  const std::size_t n = cfg.n_particles;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&](const Vector24d& sigma) {
    Vector24d v;
    for (Eigen::Index k = 0; k < 24; ++k) v[k] = gauss(rng);
    return Vector24d(sigma.cwiseProduct(v));
  };

  std::vector<Particle> particles(n);
  for (Particle& pt : particles) {
    pt.x = cfg.prior_mean + draw(cfg.prior_sigma);
    pt.p = initial_covariance;
  }
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<double> log_w(n);

  IdentificationResult result;
  Vector24d estimate = cfg.prior_mean;
  result.history.push_back(
      rms(residuals(model, apply_errors(nominal, KinematicErrorVector(estimate)), data)));

  Vector24d diffusion = cfg.diffusion_sigma;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (Particle& pt : particles) {
      pt.x += draw(diffusion);
      refine(pt.x, pt.p, result.diagnostics);
    }

    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      log_w[i] = std::log(weights[i]) + log_likelihood(data, model, nominal, particles[i].x, cfg.r);
      if (std::isnan(log_w[i])) log_w[i] = -std::numeric_limits<double>::infinity();
      max_log = std::max(max_log, log_w[i]);
    }
    if (!std::isfinite(max_log)) {
      throw DegenerateWeightsError("all particle weights vanished at iteration " +
                                   std::to_string(it) + "; increase the weighting variance R");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = std::exp(log_w[i] - max_log);
      total += weights[i];
    }
    double sum = 0.0, sum_sq = 0.0;
    estimate.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] /= total;
      sum += weights[i];
      sum_sq += weights[i] * weights[i];
      estimate += weights[i] * particles[i].x;
    }
    const double ess = 1.0 / sum_sq;
    result.diagnostics.weight_sums.push_back(sum);
    result.diagnostics.effective_sample_sizes.push_back(ess);

    if (ess < cfg.resample_threshold * static_cast<double>(n)) {
      const auto picks = systematic_resample(weights, unit(rng));
      std::vector<Particle> next;
      next.reserve(n);
      for (std::size_t idx : picks) next.push_back(particles[idx]);
      particles = std::move(next);
      std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(n));
    }

    diffusion *= cfg.diffusion_decay;
    ++result.iterations;
    result.history.push_back(
        rms(residuals(model, apply_errors(nominal, KinematicErrorVector(estimate)), data)));
  }
  result.x_hat = KinematicErrorVector(estimate);
  return result;
}

}  // namespace

Vector24d PFConfig::grouped(double length, double angle) {
  Vector24d v;
  v.head<12>().setConstant(length);
  v.tail<12>().setConstant(angle);
  return v;
}

void PFConfig::validate() const {
  if (n_particles < 1) throw std::invalid_argument("PF needs at least one particle");
  if (!prior_mean.allFinite()) throw std::invalid_argument("PF prior mean must be finite");
  if (!prior_sigma.allFinite() || (prior_sigma.array() < 0.0).any()) {
    throw std::invalid_argument("PF prior sigma must be >= 0");
  }
  if (!diffusion_sigma.allFinite() || (diffusion_sigma.array() < 0.0).any()) {
    throw std::invalid_argument("PF diffusion sigma must be >= 0");
  }
  if (!std::isfinite(diffusion_decay) || diffusion_decay < 0.0) {
    throw std::invalid_argument("PF diffusion decay must be >= 0");
  }
  if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("PF R must be >= 0");
  if (!(resample_threshold >= 0.0 && resample_threshold <= 1.0)) {
    throw std::invalid_argument("PF resample threshold must lie in [0, 1]");
  }
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, double offset) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> picks;
  picks.reserve(n);
  if (n == 0) return picks;
  const double step = 1.0 / static_cast<double>(n);
  double cumulative = weights[0];
  std::size_t i = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const double u = (offset + static_cast<double>(m)) * step;
    while (u > cumulative && i + 1 < n) cumulative += weights[++i];
    picks.push_back(i);
  }
  return picks;
}

IdentificationResult pf_identify(const Dataset& data, const CableEncoderModel& model,
                                 const DHChain& nominal, const PFConfig& cfg) {
  cfg.validate();
  data.validate();
  model.validate();
  auto result = run_particle_filter(data, model, nominal, cfg, Matrix24d::Zero(),
                                    [](Vector24d&, Matrix24d&, FilterDiagnostics&) {});
  result.method = Method::kPF;
  return result;
}

void EPFConfig::validate() const {
  pf.validate();
  ekf.validate();
}

IdentificationResult epf_identify(const Dataset& data, const CableEncoderModel& model,
                                  const DHChain& nominal, const EPFConfig& cfg) {
  cfg.validate();
  data.validate();
  model.validate();
  auto refine = [&](Vector24d& x, Matrix24d& p, FilterDiagnostics& diag) {
    for (std::size_t pass = 0; pass < cfg.ekf.passes; ++pass) {
      detail::ekf_pass(data, model, nominal, cfg.ekf, x, p, &diag);
    }
  };
  auto result = run_particle_filter(data, model, nominal, cfg.pf, cfg.ekf.p0, refine);
  result.method = Method::kEPF;
  return result;
}

}  // namespace armcal
