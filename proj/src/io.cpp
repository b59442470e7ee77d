#include "armcal/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "armcal/errors.hpp"

namespace armcal {

using nlohmann::json;

namespace {

constexpr const char* kModelFormat = "armcal-model";
constexpr const char* kReportFormat = "armcal-report";
constexpr int kVersion = 1;

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = vector_from(j.at(r));
    if (row.size() != cols) throw std::invalid_argument("ragged matrix");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

json error_vector_json(const KinematicErrorVector& x) {
  return json{{"a", vector_json(x.delta_a())},
              {"d", vector_json(x.delta_d())},
              {"theta", vector_json(x.delta_theta())},
              {"alpha", vector_json(x.delta_alpha())}};
}

KinematicErrorVector error_vector_from(const json& j) {
  KinematicErrorVector x;
  const std::pair<const char*, std::size_t> parts[] = {{"a", KinematicErrorVector::kA},
                                                       {"d", KinematicErrorVector::kD},
                                                       {"theta", KinematicErrorVector::kTheta},
                                                       {"alpha", KinematicErrorVector::kAlpha}};
  for (const auto& [key, offset] : parts) {
    const Eigen::VectorXd v = vector_from(j.at(key));
    if (v.size() != static_cast<Eigen::Index>(kJointCount))
      throw std::invalid_argument(std::string("error vector '") + key + "' needs 6 entries");
    for (std::size_t i = 0; i < kJointCount; ++i) x[offset + i] = v[static_cast<Eigen::Index>(i)];
  }
  return x;
}

json network_json(const ResidualNetwork& n) {
  return json{{"references", matrix_json(n.references())},
              {"feature_mean", vector_json(n.feature_mean())},
              {"feature_scale", vector_json(n.feature_scale())},
              {"w1", matrix_json(n.w1())},
              {"b1", vector_json(n.b1())},
              {"w2", vector_json(n.w2())},
              {"b2", n.b2()}};
}

ResidualNetwork network_from(const json& j) {
  const Eigen::VectorXd mean = vector_from(j.at("feature_mean"));
  return ResidualNetwork(matrix_from(j.at("references"), static_cast<Eigen::Index>(kJointCount)),
                         mean, vector_from(j.at("feature_scale")),
                         matrix_from(j.at("w1"), mean.size()), vector_from(j.at("b1")),
                         vector_from(j.at("w2")), j.at("b2").get<double>());
}

json result_json(const IdentificationResult& r) {
  json out{{"method", std::string(method_name(r.method))},
           {"iterations", r.iterations},
           {"history", r.history},
           {"x_hat", r.x_hat ? error_vector_json(*r.x_hat) : json(nullptr)},
           {"network", r.residual_predictor ? network_json(*r.residual_predictor) : json(nullptr)}};
  const FilterDiagnostics& d = r.diagnostics;
  json diag{{"weight_sums", d.weight_sums}, {"effective_sample_sizes", d.effective_sample_sizes}};
  if (d.covariance_checks > 0) {
    diag["min_covariance_eigenvalue"] = d.min_covariance_eigenvalue;
    diag["max_covariance_asymmetry"] = d.max_covariance_asymmetry;
    diag["covariance_checks"] = d.covariance_checks;
  }
  out["diagnostics"] = diag;
  return out;
}

IdentificationResult result_from(const json& j) {
  IdentificationResult r;
  r.method = parse_method(j.at("method").get<std::string>());
  r.iterations = j.at("iterations").get<std::size_t>();
  r.history = j.at("history").get<std::vector<double>>();
  if (!j.at("x_hat").is_null()) r.x_hat = error_vector_from(j.at("x_hat"));
  if (!j.at("network").is_null()) r.residual_predictor = network_from(j.at("network"));
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    r.diagnostics.weight_sums = d.value("weight_sums", std::vector<double>{});
    r.diagnostics.effective_sample_sizes = d.value("effective_sample_sizes", std::vector<double>{});
    if (d.contains("covariance_checks")) {
      r.diagnostics.min_covariance_eigenvalue = d.at("min_covariance_eigenvalue").get<double>();
      r.diagnostics.max_covariance_asymmetry = d.at("max_covariance_asymmetry").get<double>();
      r.diagnostics.covariance_checks = d.at("covariance_checks").get<std::size_t>();
    }
  }
  return r;
}

json metrics_json(const MetricTriple& m) {
  return json{{"rmse", m.rmse}, {"std", m.std}, {"max", m.max}};
}

json optional_metrics(const std::optional<MetricTriple>& m) {
  return m ? metrics_json(*m) : json(nullptr);
}

}  // namespace

std::string FittedModel::name() const {
  if (std::holds_alternative<EnsembleModel>(fit)) return std::string(kEnsembleName);
  return std::string(method_name(std::get<IdentificationResult>(fit).method));
}

Eigen::VectorXd FittedModel::residuals(const Dataset& data) const {
  if (const auto* e = std::get_if<EnsembleModel>(&fit))
    return ensemble_residuals(*e, encoder, nominal, data);
  return corrected_residuals(std::get<IdentificationResult>(fit), encoder, nominal, data);
}

std::string model_to_json(const FittedModel& model) {
  json links = json::array();
  for (const DHLink& l : model.nominal.links())
    links.push_back(json{{"a", l.a}, {"d", l.d}, {"theta_offset", l.theta_offset}, {"alpha", l.alpha}});
  json out{{"format", kModelFormat},
           {"version", kVersion},
           {"kind", model.name() == kEnsembleName ? "ensemble" : "identification"},
           {"nominal", links},
           {"encoder",
            {{"anchor", vector_json(model.encoder.anchor)},
             {"length_offset", model.encoder.length_offset}}}};
  if (const auto* e = std::get_if<EnsembleModel>(&model.fit)) {
    json stages = json::array();
    for (const EnsembleStage& s : e->stages)
      stages.push_back(json{{"method", std::string(method_name(s.method))},
                            {"weight", s.weight},
                            {"train_rmse_before", s.train_rmse_before},
                            {"train_rmse_after", s.train_rmse_after},
                            {"result", result_json(s.fit)}});
    out["ensemble"] = json{{"shrinkage", e->shrinkage}, {"stages", stages}};
  } else {
    out["result"] = result_json(std::get<IdentificationResult>(model.fit));
  }
  return out.dump(2) + "\n";
}

FittedModel model_from_json(const std::string& text, const std::string& origin) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != kModelFormat)
      throw ParseError(origin, 0, "not an armcal model file");
    if (j.at("version").get<int>() != kVersion)
      throw ParseError(origin, 0,
                       "unsupported model version " + std::to_string(j.at("version").get<int>()));
    FittedModel m;
    std::vector<DHLink> links;
    for (const json& l : j.at("nominal"))
      links.push_back(DHLink{l.at("a").get<double>(), l.at("d").get<double>(),
                             l.at("theta_offset").get<double>(), l.at("alpha").get<double>()});
    m.nominal = DHChain::from_links(links);
    const Eigen::VectorXd anchor = vector_from(j.at("encoder").at("anchor"));
    if (anchor.size() != 3) throw std::invalid_argument("encoder anchor needs 3 entries");
    m.encoder.anchor = anchor;
    m.encoder.length_offset = j.at("encoder").at("length_offset").get<double>();
    m.encoder.validate();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ensemble") {
      const json& e = j.at("ensemble");
      EnsembleModel ens;
      ens.shrinkage = e.at("shrinkage").get<double>();
      for (const json& s : e.at("stages")) {
        EnsembleStage st;
        st.method = parse_method(s.at("method").get<std::string>());
        st.weight = s.at("weight").get<double>();
        st.train_rmse_before = s.at("train_rmse_before").get<double>();
        st.train_rmse_after = s.at("train_rmse_after").get<double>();
        st.fit = result_from(s.at("result"));
        ens.stages.push_back(std::move(st));
      }
      if (ens.stages.empty()) throw std::invalid_argument("ensemble has no stages");
      m.fit = std::move(ens);
    } else if (kind == "identification") {
      m.fit = result_from(j.at("result"));
    } else {
      throw ParseError(origin, 0, "unknown model kind '" + kind + "'");
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(origin, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(origin, 0, e.what());
  }
}

void write_model(const std::filesystem::path& path, const FittedModel& model) {
  write_text(path, model_to_json(model));
}

FittedModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  return model_from_json(text.str(), path.string());
}

std::string error_vector_to_json(const KinematicErrorVector& x) {
  return error_vector_json(x).dump(2) + "\n";
}

std::string metrics_to_json(const MetricTriple& m) { return metrics_json(m).dump(2) + "\n"; }

std::string evaluation_to_json(const std::string& model_name, std::size_t samples,
                               const MetricTriple& before, const MetricTriple& after) {
  json out{{"model", model_name},
           {"samples", samples},
           {"before", metrics_json(before)},
           {"after", metrics_json(after)}};
  return out.dump(2) + "\n";
}

std::string report_to_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const ReportRow& r : report.rows) {
    json row{{"name", r.name}, {"train", optional_metrics(r.train)}, {"test", optional_metrics(r.test)}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json out{{"format", kReportFormat},
           {"version", kVersion},
           {"train_size", report.train_size},
           {"test_size", report.test_size},
           {"seeds", report.seeds},
           {"before", {{"train", metrics_json(report.before_train)},
                       {"test", metrics_json(report.before_test)}}},
           {"methods", rows}};
  return out.dump(2) + "\n";
}

std::string report_to_table(const ComparisonReport& report) {
  std::string out = fmt::format("{:<10}{:>10}{:>8}{:>8}  {:>10}{:>8}{:>8}\n", "method",
                                "test rmse", "std", "max", "train rmse", "std", "max");
  const auto line = [](const std::string& name, const MetricTriple& test,
                       const MetricTriple& train) {
    return fmt::format("{:<10}{:>10.3f}{:>8.3f}{:>8.3f}  {:>10.3f}{:>8.3f}{:>8.3f}\n", name,
                       test.rmse, test.std, test.max, train.rmse, train.std, train.max);
  };
  out += line("before", report.before_test, report.before_train);
  for (const ReportRow& r : report.rows) {
    if (r.test && r.train)
      out += line(r.name, *r.test, *r.train);
    else
      out += fmt::format("{:<10}failed: {}\n", r.name, r.error);
  }
  out += fmt::format("(mm; {} train / {} test samples; std is the mean absolute error)\n",
                     report.train_size, report.test_size);
  return out;
}

std::string report_series_csv(const ComparisonReport& report) {
  std::string out = "sample,before";
  for (const ReportRow& r : report.rows) out += "," + r.name;
  out += "\n";
  for (Eigen::Index i = 0; i < report.before_test_errors.size(); ++i) {
    out += std::to_string(i) + "," + shortest(report.before_test_errors[i]);
    for (const ReportRow& r : report.rows) {
      out += ",";
      if (i < r.test_errors.size()) out += shortest(r.test_errors[i]);
    }
    out += "\n";
  }
  return out;
}

std::string curve_to_csv(const EnsembleModel& ensemble, const std::vector<CurvePoint>& curve) {
  std::string out = "stages,method,weight,train_rmse,test_rmse,test_std,test_max\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const CurvePoint& p = curve[k];
    const EnsembleStage& s = ensemble.stages.at(k);
    out += fmt::format("{},{},{},{},{},{},{}\n", p.stages, method_name(s.method), shortest(s.weight),
                       shortest(p.train_rmse), shortest(p.test.rmse), shortest(p.test.std),
                       shortest(p.test.max));
  }
  return out;
}

std::string curve_to_table(const EnsembleModel& ensemble, const std::vector<CurvePoint>& curve) {
  std::string out = fmt::format("{:>6}  {:<6}{:>7}{:>12}{:>11}{:>8}{:>8}\n", "stages", "added",
                                "weight", "train rmse", "test rmse", "std", "max");
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const CurvePoint& p = curve[k];
    const EnsembleStage& s = ensemble.stages.at(k);
    out += fmt::format("{:>6}  {:<6}{:>7.0f}{:>12.3f}{:>11.3f}{:>8.3f}{:>8.3f}\n", p.stages,
                       method_name(s.method), s.weight, p.train_rmse, p.test.rmse, p.test.std,
                       p.test.max);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace armcal
