#pragma once

#include <string>
#include <vector>

#include "sigsched/blr.hpp"
#include "sigsched/core.hpp"
#include "sigsched/data.hpp"
#include "sigsched/evaluation.hpp"

namespace sigsched {

enum class PredictorKind { Residual, Blr };

inline const char* to_string(PredictorKind p) {
  return p == PredictorKind::Residual ? "residual" : "blr";
}

// Causal replay: for each analyzable event, the prediction uses only events
// from strictly earlier days (data arrives once per night). Morning and
// evening error streams are independent for the residual predictor; the BLR
// posterior is one per participant.
CohortPredictions predict_cohort_residual(const Dataset& dataset);

// Leave-one-participant-out: each participant is replayed under priors
// elicited from the other N-1.
CohortPredictions predict_cohort_blr_lopo(const Dataset& dataset);

// Same replay with one externally supplied prior for every participant.
CohortPredictions predict_cohort_blr(const Dataset& dataset, const PriorSpec& prior);

// Predictor dispatch + sweep; one full replay per grid value.
TradeoffCurve sweep(const Dataset& dataset, PredictorKind predictor, Method method,
                    std::span<const double> grid, double threshold);

// A prediction for every (participant, day, slot) cell, events or not; rows
// for schedule.csv. Ordered by (participant position, day, slot).
struct ScheduleRow {
  std::string participant;
  int day_index = 0;
  SlotKind slot = SlotKind::Morning;
  PredictionWithUQ prediction;
};
std::vector<ScheduleRow> predict_all_slots(const Dataset& dataset,
                                           PredictorKind predictor,
                                           const PriorSpec* prior);

}  // namespace sigsched
