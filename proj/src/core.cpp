#include "sigsched/core.hpp"

namespace sigsched {

const char* to_string(Weekday w) {
  switch (w) {
    case Weekday::Monday: return "monday";
    case Weekday::Tuesday: return "tuesday";
    case Weekday::Wednesday: return "wednesday";
    case Weekday::Thursday: return "thursday";
    case Weekday::Friday: return "friday";
    case Weekday::Saturday: return "saturday";
    case Weekday::Sunday: return "sunday";
  }
  return "monday";
}

Weekday weekday_from_string(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    Weekday w = static_cast<Weekday>(i);
    if (name == to_string(w)) return w;
  }
  throw ConfigError("unknown weekday name: " + name);
}

TimePoint resolve_user_time(const UserProvidedSchedule& schedule, int day_index,
                            SlotKind slot, Weekday anchor) {
  if (day_index < 0) {
    throw ValidationError("day_index must be >= 0");
  }
  const bool weekend = is_weekend(weekday_on(anchor, day_index));
  if (slot == SlotKind::Morning) {
    return weekend ? schedule.weekend_morning : schedule.weekday_morning;
  }
  return weekend ? schedule.weekend_evening : schedule.weekday_evening;
}

}  // namespace sigsched
