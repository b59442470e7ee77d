#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "armcal/ensemble.hpp"

namespace armcal {

/// Error metrics over per-sample length errors, in mm.
///
/// `std` follows the calibration literature's naming but is the mean absolute
/// error, not a standard deviation.
struct MetricTriple {
  double rmse = 0.0;
  double std = 0.0;
  double max = 0.0;
};

/// Throws std::invalid_argument on an empty input.
MetricTriple compute_metrics(const Eigen::VectorXd& errors);

/// Seeded random permutation; the first floor(fraction * n) samples train.
/// Requires at least 5 samples and both parts non-empty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

/// Name accepted by compare_table: a base method or "ensemble".
inline constexpr std::string_view kEnsembleName = "ensemble";

struct ReportRow {
  std::string name;
  std::optional<MetricTriple> train;
  std::optional<MetricTriple> test;
  std::string error;               // non-empty when the method failed
  Eigen::VectorXd test_errors;     // per test sample, after calibration
};

struct ComparisonReport {
  MetricTriple before_train;
  MetricTriple before_test;
  Eigen::VectorXd before_test_errors;
  std::vector<ReportRow> rows;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::map<std::string, std::uint64_t> seeds;

  const ReportRow* find(std::string_view name) const;
};

/// Fits every named method on `train` independently and evaluates on both
/// splits. A method that throws is recorded with its error; the rest go on.
ComparisonReport compare_table(const std::vector<std::string>& methods, const Dataset& train,
                               const Dataset& test, const CableEncoderModel& model,
                               const DHChain& nominal, const MethodSettings& settings,
                               const EnsembleOptions& ensemble);

struct CurvePoint {
  std::size_t stages = 0;
  double train_rmse = 0.0;
  MetricTriple test;
};

/// Held-out metrics of the ensemble truncated to 1..N stages.
std::vector<CurvePoint> aggregation_curve(const Dataset& train, const Dataset& test,
                                          const CableEncoderModel& model, const DHChain& nominal,
                                          const EnsembleOptions& options,
                                          const MethodSettings& settings);

std::vector<CurvePoint> aggregation_curve(const EnsembleModel& fitted, const Dataset& train,
                                          const Dataset& test, const CableEncoderModel& model,
                                          const DHChain& nominal);

}  // namespace armcal
