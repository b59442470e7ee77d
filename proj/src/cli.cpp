#include "armcal/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "armcal/config.hpp"
#include "armcal/errors.hpp"
#include "armcal/io.hpp"

namespace armcal {
namespace {

// Flags common to commands that fit models.
struct FitFlags {
  std::optional<std::uint64_t> seed;

  void add(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for every stochastic method (pf, epf, ga, svm)");
  }

  void apply(MethodSettings& m) const {
    if (!seed) return;
    m.pf.seed = m.epf.pf.seed = m.ga.seed = m.svm.seed = *seed;
    m.lmga.ga.seed = m.sga.ga.seed = m.sga.svm.seed = *seed;
  }
};

// Flags for commands that take a dataset or simulate one from the config,
// then split it.
struct DataFlags {
  std::string data;
  std::optional<std::uint64_t> data_seed;
  std::optional<double> train_fraction;
  std::optional<std::uint64_t> split_seed;

  void add(CLI::App* cmd) {
    cmd->add_option("--data", data, "Dataset CSV; simulated from the config when omitted");
    cmd->add_option("--data-seed", data_seed, "Simulation seed when --data is omitted");
    cmd->add_option("--train-fraction", train_fraction, "Share of samples used for fitting")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--split-seed", split_seed, "Seed of the train/test shuffle");
  }

  std::pair<Dataset, Dataset> load(RunConfig& cfg, std::map<std::string, std::uint64_t>& seeds) const {
    if (train_fraction) cfg.scenario.train_fraction = *train_fraction;
    if (split_seed) cfg.split_seed = *split_seed;
    if (data_seed) cfg.scenario.seed = *data_seed;
    Dataset all;
    if (data.empty()) {
      all = make_scenario(cfg.encoder, cfg.nominal, cfg.scenario).data;
      seeds["simulation"] = cfg.scenario.seed;
    } else {
      all = read_dataset_csv(data);
    }
    seeds["split"] = cfg.split_seed;
    return split_dataset(all, cfg.scenario.train_fraction, cfg.split_seed);
  }
};

void add_method_seeds(const MethodSettings& m, std::map<std::string, std::uint64_t>& seeds) {
  seeds["pf"] = m.pf.seed;
  seeds["epf"] = m.epf.pf.seed;
  seeds["ga"] = m.ga.seed;
  seeds["svm"] = m.svm.seed;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Throws std::invalid_argument listing the valid names.
void check_method_name(const std::string& name) {
  if (name == kEnsembleName) return;
  try {
    parse_method(name);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("unknown method '" + name + "'; valid: " + valid_method_names() +
                                ", " + std::string(kEnsembleName));
  }
}

// Relative output paths land in the configured output directory.
std::filesystem::path output_path(const RunConfig& cfg, const std::string& path) {
  const std::filesystem::path p = path;
  if (p.is_absolute() || cfg.output_directory == ".") return p;
  std::filesystem::create_directories(cfg.output_directory);
  return cfg.output_directory / p;
}

void emit(const RunConfig& cfg, const std::string& path, const std::string& text,
          std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text(output_path(cfg, path), text);
}

RunConfig load_config(const std::string& flag) {
  if (!flag.empty()) return load_run_config(flag);
  if (const char* env = std::getenv(kConfigEnvironmentVariable); env && *env)
    return load_run_config(env);
  return RunConfig{};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinematic calibration of a 6-axis arm from cable-encoder lengths.", "armcal"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 std::string("Run configuration file (default: $") + kConfigEnvironmentVariable +
                     ", else built-in defaults)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic dataset as CSV");
  std::optional<std::size_t> sim_n;
  std::optional<double> sim_sigma, sim_disturbance, sim_target;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_output, sim_truth;
  simulate->add_option("--n", sim_n, "Number of samples");
  simulate->add_option("--sigma", sim_sigma, "Length noise standard deviation (mm)");
  simulate->add_option("--seed", sim_seed, "Seed for the error draw, poses and noise");
  simulate->add_option("--disturbance", sim_disturbance,
                       "Amplitude of the smooth non-geometric length error (mm)");
  simulate->add_option("--target-rmse", sim_target,
                       "Scale the drawn errors to this uncorrected RMSE (mm); 0 keeps the draw");
  simulate->add_option("-o,--output", sim_output, "Dataset CSV path (default: stdout)");
  simulate->add_option("--truth", sim_truth, "Also write the true error vector as JSON");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Fit one method or the ensemble to a dataset");
  std::string cal_method, cal_data, cal_output;
  FitFlags cal_fit;
  calibrate->add_option("--method", cal_method, "Method name or 'ensemble'")->required();
  calibrate->add_option("--data", cal_data, "Training dataset CSV")->required();
  calibrate->add_option("-o,--output", cal_output, "Model JSON path (default: stdout)");
  cal_fit.add(calibrate);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Metrics of a fitted model on a dataset");
  std::string ev_model, ev_data, ev_output;
  evaluate->add_option("--model", ev_model, "Model JSON written by calibrate")->required();
  evaluate->add_option("--data", ev_data, "Dataset CSV")->required();
  evaluate->add_option("-o,--output", ev_output, "Metrics JSON path");

  // compare
  auto* compare = app.add_subcommand("compare", "Fit every method and tabulate held-out accuracy");
  std::string cmp_methods, cmp_json, cmp_table, cmp_series;
  DataFlags cmp_data;
  FitFlags cmp_fit;
  compare->add_option("--methods", cmp_methods,
                      "Comma-separated methods (default: all eight and the ensemble)");
  cmp_data.add(compare);
  cmp_fit.add(compare);
  compare->add_option("--json", cmp_json, "Report JSON path");
  compare->add_option("--table", cmp_table, "Text table path (always printed to stdout)");
  compare->add_option("--series", cmp_series, "Per-test-sample error CSV path");

  // curve
  auto* curve = app.add_subcommand("curve", "Ensemble accuracy as stages are added");
  std::string curve_output;
  DataFlags curve_data;
  FitFlags curve_fit;
  curve_data.add(curve);
  curve_fit.add(curve);
  curve->add_option("-o,--output", curve_output, "Curve CSV path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = load_config(config_path);

    if (*simulate) {
      ScenarioOptions s = cfg.scenario;
      if (sim_n) s.samples = *sim_n;
      if (sim_sigma) s.noise_sigma = *sim_sigma;
      if (sim_seed) s.seed = *sim_seed;
      if (sim_disturbance) s.simulation.disturbance_amplitude = *sim_disturbance;
      if (sim_target) s.target_rmse = *sim_target;
      const Scenario sc = make_scenario(cfg.encoder, cfg.nominal, s);
      emit(cfg, sim_output, dataset_to_csv(sc.data), out);
      if (!sim_truth.empty())
        write_text(output_path(cfg, sim_truth), error_vector_to_json(sc.true_x));
      return kExitOk;
    }

    if (*calibrate) {
      check_method_name(cal_method);
      cal_fit.apply(cfg.methods);
      const Dataset data = read_dataset_csv(cal_data);
      FittedModel model{cfg.nominal, cfg.encoder, IdentificationResult{}};
      if (cal_method == kEnsembleName)
        model.fit = boost_fit(data, cfg.encoder, cfg.nominal, cfg.ensemble, cfg.methods);
      else
        model.fit = identify(parse_method(cal_method), data, cfg.encoder, cfg.nominal, cfg.methods);
      const MetricTriple before = compute_metrics(residuals(cfg.encoder, cfg.nominal, data));
      const MetricTriple after = compute_metrics(model.residuals(data));
      emit(cfg, cal_output, model_to_json(model), out);
      if (!cal_output.empty() && cal_output != "-")
        out << fmt::format("{}: training RMSE {:.4f} -> {:.4f} mm\n", model.name(), before.rmse,
                           after.rmse);
      return kExitOk;
    }

    if (*evaluate) {
      const FittedModel model = read_model(ev_model);
      const Dataset data = read_dataset_csv(ev_data);
      const MetricTriple before = compute_metrics(residuals(model.encoder, model.nominal, data));
      const MetricTriple after = compute_metrics(model.residuals(data));
      out << fmt::format("{:<10}{:>10}{:>8}{:>8}\n", "", "rmse", "std", "max");
      out << fmt::format("{:<10}{:>10.4f}{:>8.4f}{:>8.4f}\n", "before", before.rmse, before.std,
                         before.max);
      out << fmt::format("{:<10}{:>10.4f}{:>8.4f}{:>8.4f}\n", model.name(), after.rmse, after.std,
                         after.max);
      if (!ev_output.empty())
        write_text(output_path(cfg, ev_output),
                   evaluation_to_json(model.name(), data.size(), before, after));
      return kExitOk;
    }

    if (*compare) {
      std::vector<std::string> names;
      if (cmp_methods.empty()) {
        for (Method m : kAllMethods) names.emplace_back(method_name(m));
        names.emplace_back(kEnsembleName);
      } else {
        names = split_list(cmp_methods);
      }
      for (const auto& n : names) check_method_name(n);
      cmp_fit.apply(cfg.methods);
      std::map<std::string, std::uint64_t> seeds;
      const auto [train, test] = cmp_data.load(cfg, seeds);
      ComparisonReport report =
          compare_table(names, train, test, cfg.encoder, cfg.nominal, cfg.methods, cfg.ensemble);
      add_method_seeds(cfg.methods, seeds);
      report.seeds = seeds;
      const std::string table = report_to_table(report);
      out << table;
      if (!cmp_table.empty()) write_text(output_path(cfg, cmp_table), table);
      if (!cmp_json.empty()) write_text(output_path(cfg, cmp_json), report_to_json(report));
      if (!cmp_series.empty())
        write_text(output_path(cfg, cmp_series), report_series_csv(report));
      return kExitOk;
    }

    if (*curve) {
      curve_fit.apply(cfg.methods);
      std::map<std::string, std::uint64_t> seeds;
      const auto [train, test] = curve_data.load(cfg, seeds);
      const EnsembleModel ens = boost_fit(train, cfg.encoder, cfg.nominal, cfg.ensemble, cfg.methods);
      const auto points = aggregation_curve(ens, train, test, cfg.encoder, cfg.nominal);
      out << curve_to_table(ens, points);
      if (!curve_output.empty())
        write_text(output_path(cfg, curve_output), curve_to_csv(ens, points));
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace armcal
