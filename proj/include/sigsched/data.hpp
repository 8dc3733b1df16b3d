#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigsched/core.hpp"

namespace sigsched {

struct ParticipantData {
  UserProvidedSchedule schedule;
  std::vector<BehaviorEvent> events;  // sorted by (day_index, slot)
};

// A validated cohort: every participant has at least 7 analyzable events and
// no user-provided time in [00:00, 04:00).
struct Dataset {
  std::vector<ParticipantData> participants;
  Weekday anchor = Weekday::Monday;
  std::string meta;  // free-form provenance
};

// Minimum analyzable events per participant (one week of data).
inline constexpr int kMinAnalyzableEvents = 7;

// Earliest plausible user-provided time; earlier entries are treated as
// corrupted and rejected at ingestion.
inline constexpr double kEarliestUserTimeMin = 240.0;

// Synthetic cohort parameters. Each participant gets a per-slot routine mean
// and a routine SD; user-provided times are the means plus Gaussian
// reporting bias; event noise is a two-component Gaussian scale mixture.
struct SynthConfig {
  int n_participants = 0;
  int n_days = 0;
  double morning_mean_lo = 450.0, morning_mean_hi = 690.0;
  double evening_mean_lo = 1260.0, evening_mean_hi = 1440.0;
  double sd_lo = 15.0, sd_hi = 180.0;  // drawn log-uniformly
  double reporting_bias_sd = 5.0;
  double heavy_tail_mix = 0.0;  // probability an event draws the inflated SD
  double tail_scale = 3.0;      // SD multiplier for the heavy component
  double missing_day_prob = 0.0;
  std::uint64_t seed = 0;
  Weekday anchor = Weekday::Monday;
  std::string name = "synthetic";

  void validate() const;  // throws ConfigError
};

SynthConfig synth_config_from_json_file(const std::string& path);
std::string synth_config_to_json(const SynthConfig& config);

// Sampling windows for generated events; out-of-range draws are resampled.
inline constexpr double kMorningEventLo = 240.0, kMorningEventHi = 840.0;
inline constexpr double kEveningEventLo = 960.0, kEveningEventHi = 1800.0;

Dataset load_dataset(const std::string& events_path,
                     const std::string& schedules_path, Weekday anchor);

// Writes events.csv + schedules.csv with the given provenance header lines
// (each emitted with a leading '#').
void write_dataset(const Dataset& dataset, const std::string& events_path,
                   const std::string& schedules_path,
                   const std::vector<std::string>& header_lines);

// Events with intervened_before = true removed; order preserved.
std::vector<BehaviorEvent> analyzable_events(const ParticipantData& participant);
std::vector<std::vector<BehaviorEvent>> analyzable_events(const Dataset& dataset);

struct LopoSplit {
  std::vector<std::size_t> train_indices;
  std::size_t test_index = 0;
};

// N splits, each participant held out exactly once. Throws InsufficientData
// when N < 2.
std::vector<LopoSplit> lopo_splits(const Dataset& dataset);

// Materializes the training side of a split as its own Dataset.
Dataset training_subset(const Dataset& dataset, std::size_t held_out_index);

// Deterministic function of the config (seed included).
Dataset synth_cohort(const SynthConfig& config);

// Validates dataset invariants; throws ValidationError naming the offending
// participant and rule.
void validate_dataset(const Dataset& dataset);

// Highest day_index across all events, plus one; 0 for an empty dataset.
int day_span(const Dataset& dataset);

}  // namespace sigsched
