#include "armcal/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace armcal {

MetricTriple compute_metrics(const Eigen::VectorXd& errors) {
  if (errors.size() == 0) throw std::invalid_argument("compute_metrics: no errors given");
  const auto n = static_cast<double>(errors.size());
  MetricTriple m;
  m.rmse = std::sqrt(errors.squaredNorm() / n);
  m.std = errors.cwiseAbs().sum() / n;
  m.max = errors.cwiseAbs().maxCoeff();
  return m;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
  if (data.size() < 5) throw std::invalid_argument("split_dataset: need at least 5 samples");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: train fraction must lie in (0, 1)");
  }
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(data.size())));
  if (n_train == 0 || n_train == data.size()) {
    throw std::invalid_argument("split_dataset: fraction leaves one side empty");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::pair<Dataset, Dataset> out;
  out.first.seed = data.seed;
  out.second.seed = data.seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.first : out.second).samples.push_back(data.samples[order[i]]);
  }
  return out;
}

const ReportRow* ComparisonReport::find(std::string_view name) const {
  for (const ReportRow& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

ComparisonReport compare_table(const std::vector<std::string>& methods, const Dataset& train,
                               const Dataset& test, const CableEncoderModel& model,
                               const DHChain& nominal, const MethodSettings& settings,
                               const EnsembleOptions& ensemble) {
  ComparisonReport report;
  report.train_size = train.size();
  report.test_size = test.size();
  report.before_train = compute_metrics(residuals(model, nominal, train));
  report.before_test_errors = residuals(model, nominal, test);
  report.before_test = compute_metrics(report.before_test_errors);

  for (const std::string& name : methods) {
    ReportRow row;
    row.name = name;
    try {
      Eigen::VectorXd train_err, test_err;
      if (name == kEnsembleName) {
        const EnsembleModel fitted = boost_fit(train, model, nominal, ensemble, settings);
        train_err = ensemble_residuals(fitted, model, nominal, train);
        test_err = ensemble_residuals(fitted, model, nominal, test);
      } else {
        const IdentificationResult fitted = identify(parse_method(name), train, model, nominal, settings);
        train_err = corrected_residuals(fitted, model, nominal, train);
        test_err = corrected_residuals(fitted, model, nominal, test);
      }
      row.train = compute_metrics(train_err);
      row.test = compute_metrics(test_err);
      row.test_errors = std::move(test_err);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<CurvePoint> aggregation_curve(const EnsembleModel& fitted, const Dataset& train,
                                          const Dataset& test, const CableEncoderModel& model,
                                          const DHChain& nominal) {
  std::vector<CurvePoint> curve;
  for (std::size_t k = 1; k <= fitted.stages.size(); ++k) {
    const EnsembleModel partial = fitted.truncated(k);
    CurvePoint p;
    p.stages = k;
    p.train_rmse = rms(ensemble_residuals(partial, model, nominal, train));
    p.test = compute_metrics(ensemble_residuals(partial, model, nominal, test));
    curve.push_back(p);
  }
  return curve;
}

std::vector<CurvePoint> aggregation_curve(const Dataset& train, const Dataset& test,
                                          const CableEncoderModel& model, const DHChain& nominal,
                                          const EnsembleOptions& options,
                                          const MethodSettings& settings) {
  return aggregation_curve(boost_fit(train, model, nominal, options, settings), train, test, model,
                           nominal);
}

}  // namespace armcal
