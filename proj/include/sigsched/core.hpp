#pragma once

#include <compare>
#include <string>

#include "sigsched/errors.hpp"

namespace sigsched {

// Minutes since local midnight of the event's assigned day. Evening events
// that spill past midnight stay on the prior day, so values run up to 06:00
// of the next day (1800 min, exclusive).
class TimePoint {
 public:
  static constexpr double kMin = 0.0;
  static constexpr double kMax = 1800.0;  // exclusive

  static TimePoint minutes(double m) {
    if (!(m >= kMin && m < kMax)) {
      throw ValidationError("time out of range [0, 1800): " + std::to_string(m));
    }
    return TimePoint(m);
  }
  static bool in_range(double m) { return m >= kMin && m < kMax; }

  double count() const { return minutes_; }
  auto operator<=>(const TimePoint&) const = default;

 private:
  explicit TimePoint(double m) : minutes_(m) {}
  double minutes_ = 0.0;
};

enum class SlotKind { Morning, Evening };

inline const char* to_string(SlotKind s) {
  return s == SlotKind::Morning ? "morning" : "evening";
}

enum class Weekday {
  Monday = 0,
  Tuesday,
  Wednesday,
  Thursday,
  Friday,
  Saturday,
  Sunday
};

inline bool is_weekend(Weekday w) {
  return w == Weekday::Saturday || w == Weekday::Sunday;
}

// Weekday of a trial day given the weekday of day 0.
inline Weekday weekday_on(Weekday anchor, int day_index) {
  return static_cast<Weekday>((static_cast<int>(anchor) + day_index % 7) % 7);
}

const char* to_string(Weekday w);
Weekday weekday_from_string(const std::string& name);

// One sensed behavior occurrence. (participant, day_index, slot) is unique
// within a dataset.
struct BehaviorEvent {
  std::string participant;
  int day_index = 0;
  SlotKind slot = SlotKind::Morning;
  TimePoint true_time = TimePoint::minutes(0.0);
  bool intervened_before = false;
};

// Typical behavior times a participant reports before deployment.
struct UserProvidedSchedule {
  std::string participant;
  TimePoint weekday_morning = TimePoint::minutes(450.0);
  TimePoint weekday_evening = TimePoint::minutes(1260.0);
  TimePoint weekend_morning = TimePoint::minutes(540.0);
  TimePoint weekend_evening = TimePoint::minutes(1320.0);
};

// A behavior-time forecast plus its uncertainty, both in minutes.
struct PredictionWithUQ {
  TimePoint t_hat = TimePoint::minutes(0.0);
  double sigma = 0.0;  // >= 0
};

// A scheduled decision point after slot-window clipping.
struct DecisionPoint {
  std::string participant;
  int day_index = 0;
  SlotKind slot = SlotKind::Morning;
  TimePoint time = TimePoint::minutes(0.0);
  bool clipped = false;
};

// Weekday entry when (anchor + day_index) mod 7 falls Mon-Fri, weekend entry
// otherwise, for the given slot.
TimePoint resolve_user_time(const UserProvidedSchedule& schedule, int day_index,
                            SlotKind slot, Weekday anchor);

}  // namespace sigsched
