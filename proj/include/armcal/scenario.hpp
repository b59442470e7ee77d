#pragma once

#include <cstdint>

#include "armcal/evaluate.hpp"
#include "armcal/measurement.hpp"

namespace armcal {

/// A seeded synthetic calibration problem: a random true error vector,
/// measurements of the perturbed arm, and a train/test split.
struct ScenarioOptions {
  std::size_t samples = 120;
  double noise_sigma = 0.1;  // mm
  std::uint64_t seed = 1;    // error draw, joint draws, noise and split
  double length_bound = 1.0;
  double angle_bound = 0.005;
  double target_rmse = 2.09;  // noiseless uncorrected RMSE over the test poses; <= 0 keeps the raw draw
  double train_fraction = 0.8;
  SimulationOptions simulation;

  void validate() const;
};

struct Scenario {
  KinematicErrorVector true_x;
  Dataset data;
  Dataset train;
  Dataset test;
};

Scenario make_scenario(const CableEncoderModel& model, const DHChain& nominal,
                       const ScenarioOptions& options);

}  // namespace armcal
