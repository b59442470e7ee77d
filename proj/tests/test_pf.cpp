#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "armcal/errors.hpp"
#include "armcal/identify.hpp"

using namespace armcal;

TEST_CASE("systematic resampling") {
  SUBCASE("hand example") {
    const std::vector<std::size_t> idx = systematic_resample({0.5, 0.5, 0.0, 0.0}, 0.25);
    CHECK(idx == std::vector<std::size_t>{0, 0, 1, 1});
  }
  SUBCASE("counts are floor or ceil of N w") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(37);
    for (double& v : w) v = u(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= total;
    const std::vector<std::size_t> idx = systematic_resample(w, u(rng));
    CHECK(idx.size() == w.size());
    CHECK(std::is_sorted(idx.begin(), idx.end()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto c = static_cast<double>(std::count(idx.begin(), idx.end(), i));
      CHECK(c >= std::floor(w.size() * w[i]));
      CHECK(c <= std::ceil(w.size() * w[i]));
    }
  }
}

TEST_CASE("particle filter") {
  const KinematicErrorVector truth = draw_error_vector(3, 1.0, 0.005);
  const Dataset d = simulate_dataset(default_encoder(), default_nominal_chain(), truth, 96, 0.0, 3);
  MethodSettings s;

  SUBCASE("a single particle is the estimate") {
    PFConfig cfg = s.pf;
    cfg.n_particles = 1;
    cfg.prior_mean = truth.flat() * 0.5;
    cfg.prior_sigma.setZero();
    cfg.diffusion_sigma.setZero();
    cfg.iterations = 3;
    const IdentificationResult r = pf_identify(d, default_encoder(), default_nominal_chain(), cfg);
    CHECK(r.x_hat->flat() == cfg.prior_mean);
    for (double w : r.diagnostics.weight_sums) CHECK(w == 1.0);
  }
  SUBCASE("weights are normalised every iteration") {
    const IdentificationResult r = pf_identify(d, default_encoder(), default_nominal_chain(), s.pf);
    CHECK(r.diagnostics.weight_sums.size() == s.pf.iterations);
    CHECK(r.diagnostics.effective_sample_sizes.size() == s.pf.iterations);
    for (double w : r.diagnostics.weight_sums) CHECK(std::abs(w - 1.0) <= 1e-12);
    for (double e : r.diagnostics.effective_sample_sizes) {
      CHECK(e >= 1.0 - 1e-9);
      CHECK(e <= s.pf.n_particles + 1e-9);
    }
  }
  SUBCASE("prior around the truth: residual below 10% of initial") {
    PFConfig cfg = s.pf;
    cfg.n_particles = 500;
    cfg.iterations = 30;
    cfg.prior_mean = truth.flat();
    cfg.prior_sigma = 0.1 * truth.flat().cwiseAbs();
    cfg.diffusion_sigma = 0.02 * truth.flat().cwiseAbs();
    const IdentificationResult r = pf_identify(d, default_encoder(), default_nominal_chain(), cfg);
    const double before = rms(residuals(default_encoder(), default_nominal_chain(), d));
    CHECK(r.history.back() < 0.1 * before);
  }
  SUBCASE("deterministic under a seed") {
    PFConfig cfg = s.pf;
    cfg.iterations = 5;
    const auto a = pf_identify(d, default_encoder(), default_nominal_chain(), cfg);
    const auto b = pf_identify(d, default_encoder(), default_nominal_chain(), cfg);
    CHECK(a.x_hat->flat() == b.x_hat->flat());
    cfg.seed = 2;
    const auto c = pf_identify(d, default_encoder(), default_nominal_chain(), cfg);
    CHECK_FALSE(a.x_hat->flat() == c.x_hat->flat());
  }
  SUBCASE("all weights vanish") {
    PFConfig cfg = s.pf;
    cfg.r = 0.0;
    cfg.iterations = 2;
    CHECK_THROWS_WITH_AS(pf_identify(d, default_encoder(), default_nominal_chain(), cfg),
                         doctest::Contains("weighting variance"), DegenerateWeightsError);
  }
  SUBCASE("invalid config") {
    PFConfig cfg = s.pf;
    cfg.n_particles = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = s.pf;
    cfg.prior_sigma[0] = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}
