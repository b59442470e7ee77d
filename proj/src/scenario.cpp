#include "armcal/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace armcal {

void ScenarioOptions::validate() const {
  if (samples < 5) throw std::invalid_argument("scenario needs at least 5 samples");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw std::invalid_argument("noise sigma must be finite and >= 0");
  if (!(length_bound >= 0.0) || !(angle_bound >= 0.0))
    throw std::invalid_argument("error bounds must be >= 0");
  if (!std::isfinite(target_rmse)) throw std::invalid_argument("target RMSE must be finite");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (!((simulation.joint_lower.array() <= simulation.joint_upper.array()).all()))
    throw std::invalid_argument("joint lower limits exceed upper limits");
}

Scenario make_scenario(const CableEncoderModel& model, const DHChain& nominal,
                       const ScenarioOptions& options) {
  options.validate();
  Scenario s;
  s.true_x = draw_error_vector(options.seed, options.length_bound, options.angle_bound);
  if (options.target_rmse > 0.0) {
    // Same seed and size, so these are exactly the poses measured and split
    // below; scaling uses the held-out ones.
    SimulationOptions plain = options.simulation;
    plain.disturbance_amplitude = 0.0;
    const Dataset poses =
        simulate_dataset(model, nominal, {}, options.samples, 0.0, options.seed, plain);
    const Dataset held_out = split_dataset(poses, options.train_fraction, options.seed).second;
    s.true_x = scale_to_rmse(model, nominal, s.true_x, options.target_rmse, held_out);
  }
  s.data = simulate_dataset(model, nominal, s.true_x, options.samples, options.noise_sigma,
                            options.seed, options.simulation);
  std::tie(s.train, s.test) = split_dataset(s.data, options.train_fraction, options.seed);
  return s;
}

}  // namespace armcal
