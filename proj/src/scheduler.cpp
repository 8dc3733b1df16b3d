#include "sigsched/scheduler.hpp"

#include <algorithm>

namespace sigsched {

std::pair<TimePoint, bool> clip_to_slot(SlotKind slot, double raw_minutes) {
  const double floor_min =
      slot == SlotKind::Morning ? kMorningFloorMin : kEveningFloorMin;
  if (raw_minutes < floor_min) {
    return {TimePoint::minutes(floor_min), true};
  }
  return {TimePoint::minutes(raw_minutes), false};
}

DecisionPoint schedule_sigma(const PredictionWithUQ& pred, SigmaPolicy policy,
                             SlotKind slot) {
  if (policy.c > 0.0) {
    throw ValidationError("sigma policy requires c <= 0");
  }
  if (pred.sigma < 0.0) {
    throw ValidationError("prediction sigma must be >= 0");
  }
  auto [time, clipped] = clip_to_slot(slot, pred.t_hat.count() + policy.c * pred.sigma);
  DecisionPoint dp;
  dp.slot = slot;
  dp.time = time;
  dp.clipped = clipped;
  return dp;
}

DecisionPoint schedule_fixed(TimePoint t_hat, FixedPolicy policy, SlotKind slot) {
  if (policy.offset_min > 0.0) {
    throw ValidationError("fixed policy requires offset <= 0");
  }
  auto [time, clipped] = clip_to_slot(slot, t_hat.count() + policy.offset_min);
  DecisionPoint dp;
  dp.slot = slot;
  dp.time = time;
  dp.clipped = clipped;
  return dp;
}

}  // namespace sigsched
