#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sigsched/cli.hpp"
#include "sigsched/version.hpp"

namespace {

sigsched::PredictorKind parse_predictor(const std::string& name) {
  if (name == "residual") return sigsched::PredictorKind::Residual;
  if (name == "blr") return sigsched::PredictorKind::Blr;
  throw sigsched::ConfigError("unknown predictor: " + name);
}

sigsched::Method parse_method(const std::string& name) {
  if (name == "sigma") return sigsched::Method::Sigma;
  if (name == "fixed") return sigsched::Method::Fixed;
  throw sigsched::ConfigError("unknown method: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision-point scheduling with uncertainty-scaled lead times"};
  app.set_version_flag("--version", std::string("sigsched ") + sigsched::kVersion);
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic cohort");
  std::string synth_config, synth_out;
  std::uint64_t seed_value = 0;
  synth->add_option("--config", synth_config, "cohort config JSON")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  auto* seed_opt = synth->add_option("--seed", seed_value, "override config seed");

  // elicit
  auto* elicit = app.add_subcommand("elicit", "elicit BLR priors from a cohort");
  sigsched::cli::ElicitOptions elicit_opts;
  elicit->add_option("--data", elicit_opts.data_dir, "dataset directory")->required();
  elicit->add_option("--holdout", elicit_opts.holdout,
                     "participant to exclude from training");
  elicit->add_option("--out", elicit_opts.out_path, "priors JSON path")->required();

  // schedule
  auto* schedule = app.add_subcommand("schedule", "emit decision points for a cohort");
  std::string sched_data, sched_predictor = "residual", sched_method = "sigma";
  std::string sched_priors, sched_ppc, sched_out;
  double c_value = 0.0, fixed_value = 0.0;
  schedule->add_option("--data", sched_data, "dataset directory")->required();
  schedule->add_option("--predictor", sched_predictor, "residual|blr");
  schedule->add_option("--method", sched_method, "sigma|fixed");
  auto* c_opt = schedule->add_option("--c", c_value, "critical value (sigma method)");
  auto* f_opt = schedule->add_option("--fixed-min", fixed_value,
                                     "offset in minutes (fixed method)");
  schedule->add_option("--priors", sched_priors, "priors JSON (required for blr)");
  schedule->add_option("--c-per-participant", sched_ppc,
                       "JSON map participant->c overriding --c");
  schedule->add_option("--out", sched_out, "schedule.csv path")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "tradeoff curves and bounded AUC");
  std::string sweep_data, sweep_predictor = "residual", sweep_out, sweep_priors;
  std::string thresholds_spec, grid_c_spec, grid_f_spec;
  bool svg = false;
  sweep->add_option("--data", sweep_data, "dataset directory")->required();
  sweep->add_option("--predictor", sweep_predictor, "residual|blr");
  sweep->add_option("--thresholds", thresholds_spec,
                    "comma list or lo:hi:count (default 0.66..0.99 table)");
  sweep->add_option("--grid-c", grid_c_spec, "sigma grid (default -3:0:31)");
  sweep->add_option("--grid-f", grid_f_spec, "fixed grid minutes (default -360:0:37)");
  sweep->add_option("--priors", sweep_priors,
                    "fixed priors JSON (default: leave-one-participant-out)");
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_flag("--svg", svg, "emit one tradeoff SVG per threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      sigsched::cli::SynthOptions options;
      options.config_path = synth_config;
      options.out_dir = synth_out;
      if (seed_opt->count() > 0) options.seed_override = seed_value;
      sigsched::cli::run_synth(options);
    } else if (elicit->parsed()) {
      sigsched::cli::run_elicit(elicit_opts);
    } else if (schedule->parsed()) {
      sigsched::cli::ScheduleOptions options;
      options.data_dir = sched_data;
      options.predictor = parse_predictor(sched_predictor);
      options.method = parse_method(sched_method);
      if (c_opt->count() > 0) options.c = c_value;
      if (f_opt->count() > 0) options.fixed_min = fixed_value;
      options.priors_path = sched_priors;
      options.per_participant_c_path = sched_ppc;
      options.out_path = sched_out;
      sigsched::cli::run_schedule(options);
    } else if (sweep->parsed()) {
      sigsched::cli::SweepOptions options;
      options.data_dir = sweep_data;
      options.predictor = parse_predictor(sweep_predictor);
      if (!thresholds_spec.empty()) {
        options.thresholds = sigsched::cli::parse_grid_spec(thresholds_spec);
      }
      if (!grid_c_spec.empty()) {
        options.grid_c = sigsched::cli::parse_grid_spec(grid_c_spec);
      }
      if (!grid_f_spec.empty()) {
        options.grid_f = sigsched::cli::parse_grid_spec(grid_f_spec);
      }
      options.priors_path = sweep_priors;
      options.out_dir = sweep_out;
      options.svg = svg;
      sigsched::cli::run_sweep(options);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sigsched::cli::exit_code_for(e);
  }
  return 0;
}
