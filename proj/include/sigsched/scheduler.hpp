#pragma once

#include <utility>

#include "sigsched/core.hpp"

namespace sigsched {

// Uncertainty-scaled rule: t_k = t_hat_k + c * sigma_k with c <= 0.
struct SigmaPolicy {
  double c = 0.0;
};

// Status-quo rule: t_k = t_hat_k + F with a fixed offset F <= 0 (minutes).
struct FixedPolicy {
  double offset_min = 0.0;
};

// Slot window floors: decision points never precede 04:00 (morning) or
// 16:00 (evening).
inline constexpr double kMorningFloorMin = 240.0;
inline constexpr double kEveningFloorMin = 960.0;

// Raises a raw scheduled time to the slot floor. Returns the final time and
// whether it was raised.
std::pair<TimePoint, bool> clip_to_slot(SlotKind slot, double raw_minutes);

// Decision points carry identity (participant, day) filled in by the caller;
// these kernels compute only the slot, time, and clipped flag.
DecisionPoint schedule_sigma(const PredictionWithUQ& pred, SigmaPolicy policy,
                             SlotKind slot);
DecisionPoint schedule_fixed(TimePoint t_hat, FixedPolicy policy, SlotKind slot);

}  // namespace sigsched
