#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "internal.hpp"

namespace armcal {
namespace {

struct Individual {
  Vector24d genes;
  double fitness;  // mean squared length residual, mm^2
};

double mean_squared_residual(const Dataset& data, const CableEncoderModel& model,
                             const DHChain& nominal, const Vector24d& genes) {
  const Eigen::VectorXd r =
      residuals(model, apply_errors(nominal, KinematicErrorVector(genes)), data);
  return r.squaredNorm() / static_cast<double>(r.size());
}

}  // namespace

void GAConfig::validate() const {
  if (population < 2) throw std::invalid_argument("GA population must be >= 2");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw std::invalid_argument("GA crossover rate must lie in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw std::invalid_argument("GA mutation rate must lie in [0, 1]");
  }
  if (!mutation_sigma.allFinite() || (mutation_sigma.array() < 0.0).any()) {
    throw std::invalid_argument("GA mutation sigma must be >= 0");
  }
  if (!lower.allFinite() || !upper.allFinite() || (upper.array() < lower.array()).any()) {
    throw std::invalid_argument("GA search bounds must be finite with lower <= upper");
  }
  if (elitism >= population) throw std::invalid_argument("GA elitism must be < population");
  if (initial_individuals.size() > population) {
    throw std::invalid_argument("GA has more initial individuals than population slots");
  }
}

IdentificationResult ga_identify(const Dataset& data, const CableEncoderModel& model,
                                 const DHChain& nominal, const GAConfig& cfg) {
  cfg.validate();
  data.validate();
  model.validate();

  IdentificationResult result;
  result.method = Method::kGA;
  const Vector24d centre = 0.5 * (cfg.lower + cfg.upper);
  if (cfg.generations == 0) {
    result.x_hat = KinematicErrorVector(centre);
    result.history.push_back(std::sqrt(mean_squared_residual(data, model, nominal, centre)));
    return result;
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.population - 1);
  const auto clamp = [&](Vector24d g) { return Vector24d(g.cwiseMax(cfg.lower).cwiseMin(cfg.upper)); };
  const auto evaluate = [&](const Vector24d& g) {
    return Individual{g, mean_squared_residual(data, model, nominal, g)};
  };

  std::vector<Individual> pop;
  pop.reserve(cfg.population);
  for (const auto& seed_x : cfg.initial_individuals) pop.push_back(evaluate(clamp(seed_x.flat())));
  if (pop.size() < cfg.population) pop.push_back(evaluate(centre));
  while (pop.size() < cfg.population) {
    Vector24d g;
    for (Eigen::Index k = 0; k < 24; ++k) g[k] = cfg.lower[k] + unit(rng) * (cfg.upper[k] - cfg.lower[k]);
    pop.push_back(evaluate(g));
  }
  const auto by_fitness = [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; };
  std::stable_sort(pop.begin(), pop.end(), by_fitness);
  Individual best = pop.front();
  result.history.push_back(std::sqrt(best.fitness));

  const auto tournament = [&]() -> const Individual& {
    std::size_t best = pick(rng);
    for (std::size_t t = 1; t < GAConfig::kTournamentSize; ++t) {
      const std::size_t c = pick(rng);
      if (pop[c].fitness < pop[best].fitness) best = c;
    }
    return pop[best];
  };

  Vector24d sigma = cfg.mutation_sigma;
  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Individual> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(cfg.elitism));
    next.reserve(cfg.population);
    while (next.size() < cfg.population) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      Vector24d child = a.genes;
      if (unit(rng) < cfg.crossover_rate) {
        // BLX-alpha: uniform over the parents' interval widened by alpha on each side.
        for (Eigen::Index k = 0; k < 24; ++k) {
          const double lo = std::min(a.genes[k], b.genes[k]);
          const double span = std::abs(a.genes[k] - b.genes[k]);
          child[k] = lo - GAConfig::kBlendAlpha * span +
                     unit(rng) * span * (1.0 + 2.0 * GAConfig::kBlendAlpha);
        }
      }
      for (Eigen::Index k = 0; k < 24; ++k) {
        if (unit(rng) < cfg.mutation_rate) child[k] += sigma[k] * gauss(rng);
      }
      next.push_back(evaluate(clamp(child)));
    }
    pop = std::move(next);
    std::stable_sort(pop.begin(), pop.end(), by_fitness);
    if (pop.front().fitness < best.fitness) best = pop.front();
    sigma *= cfg.mutation_decay;
    ++result.iterations;
    result.history.push_back(std::sqrt(best.fitness));
  }

  result.x_hat = KinematicErrorVector(best.genes);
  return result;
}

}  // namespace armcal
