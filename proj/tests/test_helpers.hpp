#pragma once

// Shared builders for unit and acceptance tests.

#include <string>
#include <vector>

#include "sigsched/blr.hpp"
#include "sigsched/core.hpp"
#include "sigsched/data.hpp"

namespace sigsched::testing {

inline UserProvidedSchedule make_schedule(const std::string& id, double wm,
                                          double we, double km, double ke) {
  UserProvidedSchedule s;
  s.participant = id;
  s.weekday_morning = TimePoint::minutes(wm);
  s.weekday_evening = TimePoint::minutes(we);
  s.weekend_morning = TimePoint::minutes(km);
  s.weekend_evening = TimePoint::minutes(ke);
  return s;
}

inline BehaviorEvent make_event(const std::string& id, int day, SlotKind slot,
                                double time, bool intervened = false) {
  BehaviorEvent e;
  e.participant = id;
  e.day_index = day;
  e.slot = slot;
  e.true_time = TimePoint::minutes(time);
  e.intervened_before = intervened;
  return e;
}

// Generating weights for exactly-linear cohorts: every coefficient nonzero so
// all regressors come out significant, and scaled so targets stay inside the
// plausible slot windows.
inline Eigen::VectorXd noiseless_weights() {
  Eigen::VectorXd w(kFeatureDim);
  w(feat::kIntercept) = 25.0;
  w(feat::kUserTime) = 0.9;
  w(feat::kDowFirst + 0) = 4.0;   // Tuesday
  w(feat::kDowFirst + 1) = -6.0;  // Wednesday
  w(feat::kDowFirst + 2) = 2.0;   // Thursday
  w(feat::kDowFirst + 3) = 8.0;   // Friday
  w(feat::kDowFirst + 4) = -3.0;  // Saturday
  w(feat::kDowFirst + 5) = 5.0;   // Sunday
  w(feat::kIsEvening) = 12.0;
  w(feat::kWindowMin) = 0.03;
  w(feat::kWindowMax) = 0.02;
  w(feat::kWindowCv) = 40.0;
  w(feat::kMostRecent) = 0.05;
  w(feat::kNoBrushDays) = 1.5;
  return w;
}

// Events generated sequentially so that t*_k equals weights . featurize(k)
// exactly (features of later rows depend on earlier generated times).
inline ParticipantData make_linear_participant(const std::string& id,
                                               const UserProvidedSchedule& schedule,
                                               const Eigen::VectorXd& weights,
                                               int n_days, Weekday anchor) {
  ParticipantData p;
  p.schedule = schedule;
  p.schedule.participant = id;
  for (int day = 0; day < n_days; ++day) {
    for (SlotKind slot : {SlotKind::Morning, SlotKind::Evening}) {
      std::vector<BehaviorEvent> visible;
      for (const auto& e : p.events) {
        if (e.day_index < day) visible.push_back(e);
      }
      const FeatureVector x = featurize(visible, p.schedule, day, slot, anchor);
      const double t = weights.dot(x);
      p.events.push_back(make_event(id, day, slot, t));
    }
  }
  return p;
}

inline Dataset make_linear_cohort(int n_participants, int n_days, Weekday anchor) {
  Dataset ds;
  ds.anchor = anchor;
  ds.meta = "noiseless linear test cohort";
  const Eigen::VectorXd w = noiseless_weights();
  for (int i = 0; i < n_participants; ++i) {
    const std::string id = "L" + std::to_string(i + 1);
    // Distinct schedules so pooled user-time values vary across participants.
    const double shift = 35.0 * i;
    const auto schedule = make_schedule(id, 430.0 + shift, 1230.0 + shift,
                                        505.0 + shift, 1305.0 + shift);
    ds.participants.push_back(
        make_linear_participant(id, schedule, w, n_days, anchor));
  }
  return ds;
}

}  // namespace sigsched::testing
