#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sigsched/data.hpp"
#include "sigsched/evaluation.hpp"
#include "sigsched/replay.hpp"

namespace sigsched::cli {

struct SynthOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
};

struct ElicitOptions {
  std::string data_dir;
  std::string holdout;  // empty: train on the whole cohort
  std::string out_path;
};

struct ScheduleOptions {
  std::string data_dir;
  PredictorKind predictor = PredictorKind::Residual;
  Method method = Method::Sigma;
  std::optional<double> c;
  std::optional<double> fixed_min;
  std::string priors_path;            // required for blr
  std::string per_participant_c_path; // optional JSON {participant: c}
  std::string out_path;
};

struct SweepOptions {
  std::string data_dir;
  PredictorKind predictor = PredictorKind::Residual;
  std::vector<double> thresholds;  // empty: defaults
  std::vector<double> grid_c;      // empty: defaults
  std::vector<double> grid_f;      // empty: defaults
  std::string out_dir;
  std::string priors_path;  // optional for blr; empty: per-participant LOPO
  bool svg = false;
};

void run_synth(const SynthOptions& options);
void run_elicit(const ElicitOptions& options);
void run_schedule(const ScheduleOptions& options);
void run_sweep(const SweepOptions& options);

// "lo:hi:count" linspace or comma-separated values.
std::vector<double> parse_grid_spec(const std::string& spec);

// Dataset directory loader (events.csv + schedules.csv + dataset-meta.json;
// the meta file supplies the calendar anchor, defaulting to Monday).
Dataset load_data_dir(const std::string& dir);

// 0 success, 2 config error, 3 data/precondition error, 4 numerical failure.
int exit_code_for(const std::exception& error);

}  // namespace sigsched::cli
