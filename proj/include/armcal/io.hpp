#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "armcal/evaluate.hpp"

namespace armcal {

/// A fitted calibration bundled with the nominal arm and encoder it was
/// fitted against, so it can be applied to new data on its own.
struct FittedModel {
  DHChain nominal = default_nominal_chain();
  CableEncoderModel encoder = default_encoder();
  std::variant<IdentificationResult, EnsembleModel> fit;

  /// "ensemble" or the base method name.
  std::string name() const;
  /// measured - nominal - predicted correction, per sample.
  Eigen::VectorXd residuals(const Dataset& data) const;
};

/// Versioned JSON document: {"format": "armcal-model", "version": 1, ...}.
std::string model_to_json(const FittedModel& model);
/// Throws ParseError (path = `origin`) on malformed or unsupported documents.
FittedModel model_from_json(const std::string& text, const std::string& origin);

void write_model(const std::filesystem::path& path, const FittedModel& model);
FittedModel read_model(const std::filesystem::path& path);

/// Error vector as {"a": [...], "d": [...], "theta": [...], "alpha": [...]}.
std::string error_vector_to_json(const KinematicErrorVector& x);

std::string metrics_to_json(const MetricTriple& metrics);
std::string evaluation_to_json(const std::string& model_name, std::size_t samples,
                               const MetricTriple& before, const MetricTriple& after);
std::string report_to_json(const ComparisonReport& report);
/// Aligned text table: one row per method, RMSE/Std/Max for test (and train).
std::string report_to_table(const ComparisonReport& report);
/// One row per test sample: index, before, then one column per method.
std::string report_series_csv(const ComparisonReport& report);

std::string curve_to_csv(const EnsembleModel& ensemble, const std::vector<CurvePoint>& curve);
std::string curve_to_table(const EnsembleModel& ensemble, const std::vector<CurvePoint>& curve);

/// Writes `text` exactly; throws Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace armcal
