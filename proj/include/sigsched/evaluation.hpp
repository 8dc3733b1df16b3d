#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigsched/core.hpp"
#include "sigsched/scheduler.hpp"

namespace sigsched {

enum class Method { Sigma, Fixed };

inline const char* to_string(Method m) {
  return m == Method::Sigma ? "sigma" : "fixed";
}

// Per-participant coverage and delay. Coverage counts strict precedence
// t_k < t*_k; the delay mean conditions on covered events and is therefore
// undefined when none are covered.
struct ParticipantMetrics {
  std::string participant;
  int analyzed = 0;  // K
  int covered = 0;   // P
  double coverage = 0.0;
  std::optional<double> mean_delay_min;
};

struct TradeoffPoint {
  double parameter = 0.0;  // c (sigma method) or F in minutes (fixed method)
  double mean_delay_hours = 0.0;
  double proportion_meeting = 0.0;
};

struct TradeoffCurve {
  Method method = Method::Sigma;
  double threshold = 0.0;
  std::vector<TradeoffPoint> points;  // in grid order; auc() sorts by delay
};

// dps and events must be aligned one-to-one on (day_index, slot); intervened
// events are excluded upstream. Throws EmptyInput when events is empty.
ParticipantMetrics participant_metrics(std::span<const DecisionPoint> dps,
                                       std::span<const BehaviorEvent> events);

// Cohort aggregate at one parameter value. Participants with zero covered
// events count in the proportion denominator but are skipped in the delay
// mean (0 when nobody covers anything).
TradeoffPoint cohort_point(const std::vector<ParticipantMetrics>& metrics,
                           double threshold);

// One prediction per analyzable event, aligned with the event stream;
// predictor-independent input to sweeps.
struct ParticipantPredictions {
  std::string participant;
  std::vector<BehaviorEvent> events;
  std::vector<PredictionWithUQ> predictions;
};
using CohortPredictions = std::vector<ParticipantPredictions>;

// Schedules every event under one parameter value and collects per-
// participant metrics. Exposed so scans (e.g. clipping audits) can reuse it.
std::vector<ParticipantMetrics> replay_metrics(const CohortPredictions& cohort,
                                               Method method, double parameter,
                                               std::vector<DecisionPoint>* dps_out = nullptr);

// One TradeoffPoint per grid value; each point is an independent full replay.
TradeoffCurve sweep_curve(const CohortPredictions& cohort, Method method,
                          std::span<const double> grid, double threshold);

// Area between the delay-sorted curve and the 50% floor, truncated at 5 h.
// Linear interpolation between points, constant extrapolation to the ends,
// exact trapezoids (segments split where the curve crosses the floor).
// Units: percentage-point-hours, in [0, 250].
double auc(const TradeoffCurve& curve);

inline constexpr double kAucMaxDelayHours = 5.0;
inline constexpr double kAucFloorPercent = 50.0;

// Default sweep grids: 31 evenly spaced c in [-3, 0], 37 evenly spaced F in
// [-360, 0] minutes.
std::vector<double> default_sigma_grid();
std::vector<double> default_fixed_grid();

// Default desired-coverage thresholds, 0.66 through 0.99.
std::vector<double> default_thresholds();

// Evenly spaced inclusive grid.
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace sigsched
