#include "sigsched/data.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include <json.hpp>

#include "sigsched/csv.hpp"
#include "sigsched/rng.hpp"

namespace sigsched {

namespace {

std::string participant_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "P%03d", index + 1);
  return buf;
}

void check_user_time(const std::string& participant, const char* field,
                     double minutes) {
  if (!TimePoint::in_range(minutes)) {
    throw ValidationError("participant " + participant + ": " + field +
                          " outside [0, 1800): " + std::to_string(minutes));
  }
  if (minutes < kEarliestUserTimeMin) {
    throw ValidationError("participant " + participant + ": " + field +
                          " falls in [00:00, 04:00), treated as corrupted");
  }
}

SlotKind parse_slot(const std::string& text, long line) {
  if (text == "morning") return SlotKind::Morning;
  if (text == "evening") return SlotKind::Evening;
  throw ParseError("unknown slot '" + text + "'", line, "slot");
}

bool event_order(const BehaviorEvent& a, const BehaviorEvent& b) {
  if (a.day_index != b.day_index) return a.day_index < b.day_index;
  return static_cast<int>(a.slot) < static_cast<int>(b.slot);
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("synth config: " + msg); };
  if (n_participants < 1) fail("n_participants must be >= 1");
  if (n_days < 1) fail("n_days must be >= 1");
  if (!(morning_mean_lo <= morning_mean_hi) || morning_mean_lo < kMorningEventLo ||
      morning_mean_hi > kMorningEventHi) {
    fail("morning_mean_range must lie within [240, 840]");
  }
  if (!(evening_mean_lo <= evening_mean_hi) || evening_mean_lo < kEveningEventLo ||
      evening_mean_hi >= kEveningEventHi) {
    fail("evening_mean_range must lie within [960, 1800)");
  }
  if (!(sd_lo > 0.0) || !(sd_lo <= sd_hi)) fail("sd_range must satisfy 0 < lo <= hi");
  if (reporting_bias_sd < 0.0) fail("reporting_bias_sd must be >= 0");
  if (heavy_tail_mix < 0.0 || heavy_tail_mix > 1.0) fail("heavy_tail_mix must be in [0, 1]");
  if (!(tail_scale > 0.0)) fail("tail_scale must be > 0");
  if (missing_day_prob < 0.0 || missing_day_prob > 1.0) {
    fail("missing_day_prob must be in [0, 1]");
  }
}

SynthConfig synth_config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  SynthConfig cfg;
  try {
    cfg.n_participants = doc.at("n_participants").get<int>();
    cfg.n_days = doc.at("n_days").get<int>();
    cfg.morning_mean_lo = doc.at("morning_mean_range").at(0).get<double>();
    cfg.morning_mean_hi = doc.at("morning_mean_range").at(1).get<double>();
    cfg.evening_mean_lo = doc.at("evening_mean_range").at(0).get<double>();
    cfg.evening_mean_hi = doc.at("evening_mean_range").at(1).get<double>();
    cfg.sd_lo = doc.at("sd_range").at(0).get<double>();
    cfg.sd_hi = doc.at("sd_range").at(1).get<double>();
    cfg.reporting_bias_sd = doc.at("reporting_bias_sd").get<double>();
    cfg.heavy_tail_mix = doc.at("heavy_tail_mix").get<double>();
    cfg.tail_scale = doc.at("tail_scale").get<double>();
    cfg.missing_day_prob = doc.at("missing_day_prob").get<double>();
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("anchor")) {
      cfg.anchor = weekday_from_string(doc.at("anchor").get<std::string>());
    }
    if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad synth config " + path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string synth_config_to_json(const SynthConfig& config) {
  nlohmann::json doc;
  doc["name"] = config.name;
  doc["n_participants"] = config.n_participants;
  doc["n_days"] = config.n_days;
  doc["morning_mean_range"] = {config.morning_mean_lo, config.morning_mean_hi};
  doc["evening_mean_range"] = {config.evening_mean_lo, config.evening_mean_hi};
  doc["sd_range"] = {config.sd_lo, config.sd_hi};
  doc["reporting_bias_sd"] = config.reporting_bias_sd;
  doc["heavy_tail_mix"] = config.heavy_tail_mix;
  doc["tail_scale"] = config.tail_scale;
  doc["missing_day_prob"] = config.missing_day_prob;
  doc["seed"] = config.seed;
  doc["anchor"] = to_string(config.anchor);
  return doc.dump(2);
}

void validate_dataset(const Dataset& dataset) {
  std::set<std::string> seen_ids;
  for (const auto& p : dataset.participants) {
    const std::string& id = p.schedule.participant;
    if (!seen_ids.insert(id).second) {
      throw ValidationError("duplicate participant id: " + id);
    }
    check_user_time(id, "weekday_morning", p.schedule.weekday_morning.count());
    check_user_time(id, "weekday_evening", p.schedule.weekday_evening.count());
    check_user_time(id, "weekend_morning", p.schedule.weekend_morning.count());
    check_user_time(id, "weekend_evening", p.schedule.weekend_evening.count());

    std::set<std::pair<int, int>> keys;
    int analyzable = 0;
    for (const auto& e : p.events) {
      if (e.participant != id) {
        throw ValidationError("participant " + id + ": event tagged with id " +
                              e.participant);
      }
      if (e.day_index < 0) {
        throw ValidationError("participant " + id + ": negative day_index");
      }
      if (!keys.insert({e.day_index, static_cast<int>(e.slot)}).second) {
        throw ValidationError("participant " + id + ": duplicate (day, slot) " +
                              std::to_string(e.day_index) + "/" + to_string(e.slot));
      }
      if (!e.intervened_before) ++analyzable;
    }
    if (analyzable < kMinAnalyzableEvents) {
      throw ValidationError("participant " + id + ": only " +
                            std::to_string(analyzable) +
                            " analyzable events, minimum is " +
                            std::to_string(kMinAnalyzableEvents));
    }
    if (!std::is_sorted(p.events.begin(), p.events.end(), event_order)) {
      throw ValidationError("participant " + id + ": events not sorted by (day, slot)");
    }
  }
}

Dataset load_dataset(const std::string& events_path,
                     const std::string& schedules_path, Weekday anchor) {
  Dataset ds;
  ds.anchor = anchor;

  csv::Table sched = csv::read_file(schedules_path);
  const auto s_id = sched.column_index("participant_id");
  const auto s_wm = sched.column_index("weekday_morning_min");
  const auto s_we = sched.column_index("weekday_evening_min");
  const auto s_km = sched.column_index("weekend_morning_min");
  const auto s_ke = sched.column_index("weekend_evening_min");

  std::map<std::string, std::size_t> index_of;
  for (std::size_t r = 0; r < sched.rows.size(); ++r) {
    const auto& row = sched.rows[r];
    const long line = sched.line_numbers[r];
    const std::string& id = row[s_id];
    if (id.empty()) throw ParseError("empty participant_id", line, "participant_id");
    if (index_of.count(id)) {
      throw ParseError("duplicate schedule for participant " + id, line,
                       "participant_id");
    }
    const double wm = csv::parse_double(row[s_wm], line, "weekday_morning_min");
    const double we = csv::parse_double(row[s_we], line, "weekday_evening_min");
    const double km = csv::parse_double(row[s_km], line, "weekend_morning_min");
    const double ke = csv::parse_double(row[s_ke], line, "weekend_evening_min");
    check_user_time(id, "weekday_morning", wm);
    check_user_time(id, "weekday_evening", we);
    check_user_time(id, "weekend_morning", km);
    check_user_time(id, "weekend_evening", ke);

    ParticipantData p;
    p.schedule.participant = id;
    p.schedule.weekday_morning = TimePoint::minutes(wm);
    p.schedule.weekday_evening = TimePoint::minutes(we);
    p.schedule.weekend_morning = TimePoint::minutes(km);
    p.schedule.weekend_evening = TimePoint::minutes(ke);
    index_of[id] = ds.participants.size();
    ds.participants.push_back(std::move(p));
  }

  csv::Table events = csv::read_file(events_path);
  const auto e_id = events.column_index("participant_id");
  const auto e_day = events.column_index("day_index");
  const auto e_slot = events.column_index("slot");
  const auto e_time = events.column_index("event_time_min");
  const auto e_int = events.column_index("intervened_before");

  std::set<std::tuple<std::string, int, int>> keys;
  for (std::size_t r = 0; r < events.rows.size(); ++r) {
    const auto& row = events.rows[r];
    const long line = events.line_numbers[r];
    const std::string& id = row[e_id];
    auto it = index_of.find(id);
    if (it == index_of.end()) {
      throw ValidationError("event for unknown participant " + id + " at row " +
                            std::to_string(line));
    }
    BehaviorEvent ev;
    ev.participant = id;
    ev.day_index = static_cast<int>(csv::parse_long(row[e_day], line, "day_index"));
    if (ev.day_index < 0) {
      throw ValidationError("participant " + id + ": negative day_index at row " +
                            std::to_string(line));
    }
    ev.slot = parse_slot(row[e_slot], line);
    const double t = csv::parse_double(row[e_time], line, "event_time_min");
    if (!TimePoint::in_range(t)) {
      throw ValidationError("participant " + id + ": event_time_min outside [0, 1800) at row " +
                            std::to_string(line));
    }
    ev.true_time = TimePoint::minutes(t);
    const long flag = csv::parse_long(row[e_int], line, "intervened_before");
    if (flag != 0 && flag != 1) {
      throw ParseError("intervened_before must be 0 or 1", line, "intervened_before");
    }
    ev.intervened_before = flag == 1;
    if (!keys.insert({id, ev.day_index, static_cast<int>(ev.slot)}).second) {
      throw ParseError("duplicate (participant, day, slot) " + id + "/" +
                           std::to_string(ev.day_index) + "/" + to_string(ev.slot),
                       line, "day_index");
    }
    ds.participants[it->second].events.push_back(std::move(ev));
  }

  for (auto& p : ds.participants) {
    std::sort(p.events.begin(), p.events.end(), event_order);
  }
  validate_dataset(ds);
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& events_path,
                   const std::string& schedules_path,
                   const std::vector<std::string>& header_lines) {
  std::ofstream ev(events_path);
  std::ofstream sc(schedules_path);
  if (!ev || !sc) {
    throw Error("cannot open output files under: " + events_path);
  }
  for (const auto& line : header_lines) {
    ev << "# " << line << "\n";
    sc << "# " << line << "\n";
  }
  sc << "participant_id,weekday_morning_min,weekday_evening_min,weekend_morning_min,weekend_evening_min\n";
  ev << "participant_id,day_index,slot,event_time_min,intervened_before\n";
  for (const auto& p : dataset.participants) {
    const auto& s = p.schedule;
    sc << s.participant << ',' << csv::format_double(s.weekday_morning.count())
       << ',' << csv::format_double(s.weekday_evening.count()) << ','
       << csv::format_double(s.weekend_morning.count()) << ','
       << csv::format_double(s.weekend_evening.count()) << '\n';
    for (const auto& e : p.events) {
      ev << e.participant << ',' << e.day_index << ',' << to_string(e.slot) << ','
         << csv::format_double(e.true_time.count()) << ','
         << (e.intervened_before ? 1 : 0) << '\n';
    }
  }
}

std::vector<BehaviorEvent> analyzable_events(const ParticipantData& participant) {
  std::vector<BehaviorEvent> out;
  out.reserve(participant.events.size());
  for (const auto& e : participant.events) {
    if (!e.intervened_before) out.push_back(e);
  }
  return out;
}

std::vector<std::vector<BehaviorEvent>> analyzable_events(const Dataset& dataset) {
  std::vector<std::vector<BehaviorEvent>> out;
  out.reserve(dataset.participants.size());
  for (const auto& p : dataset.participants) out.push_back(analyzable_events(p));
  return out;
}

std::vector<LopoSplit> lopo_splits(const Dataset& dataset) {
  const std::size_t n = dataset.participants.size();
  if (n < 2) {
    throw InsufficientData("leave-one-participant-out needs >= 2 participants");
  }
  std::vector<LopoSplit> splits(n);
  for (std::size_t i = 0; i < n; ++i) {
    splits[i].test_index = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) splits[i].train_indices.push_back(j);
    }
  }
  return splits;
}

Dataset training_subset(const Dataset& dataset, std::size_t held_out_index) {
  Dataset out;
  out.anchor = dataset.anchor;
  out.meta = dataset.meta;
  for (std::size_t i = 0; i < dataset.participants.size(); ++i) {
    if (i != held_out_index) out.participants.push_back(dataset.participants[i]);
  }
  return out;
}

Dataset synth_cohort(const SynthConfig& config) {
  config.validate();
  Dataset ds;
  ds.anchor = config.anchor;
  ds.meta = "synth:" + config.name + " generator=mt19937_64/box-muller seed=" +
            std::to_string(config.seed);

  for (int i = 0; i < config.n_participants; ++i) {
    SeededRng rng(mix_seed(config.seed, static_cast<std::uint64_t>(i)));
    const std::string id = participant_id(i);

    ParticipantData p;
    // Rare degenerate draws (too many missing days) are regenerated from the
    // participant's continuing stream so the dataset invariant always holds.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      p = ParticipantData{};
      p.schedule.participant = id;

      const double morning_mean = rng.uniform(config.morning_mean_lo, config.morning_mean_hi);
      const double evening_mean = rng.uniform(config.evening_mean_lo, config.evening_mean_hi);
      // Log-uniform: routine regularity is a scale parameter, and irregular
      // participants are the minority of a cohort.
      const double routine_sd =
          std::exp(rng.uniform(std::log(config.sd_lo), std::log(config.sd_hi)));

      auto draw_user_time = [&](double mean, double lo, double hi) {
        double t = rng.normal(mean, config.reporting_bias_sd);
        while (!(t >= lo && t < hi)) t = rng.normal(mean, config.reporting_bias_sd);
        return TimePoint::minutes(t);
      };
      p.schedule.weekday_morning = draw_user_time(morning_mean, kMorningEventLo, kMorningEventHi);
      p.schedule.weekend_morning = draw_user_time(morning_mean, kMorningEventLo, kMorningEventHi);
      p.schedule.weekday_evening = draw_user_time(evening_mean, kEveningEventLo, kEveningEventHi);
      p.schedule.weekend_evening = draw_user_time(evening_mean, kEveningEventLo, kEveningEventHi);

      auto draw_event_time = [&](double mean, double lo, double hi) {
        const double sd = rng.bernoulli(config.heavy_tail_mix)
                              ? routine_sd * config.tail_scale
                              : routine_sd;
        double t = rng.normal(mean, sd);
        while (!(t >= lo && t < hi)) t = rng.normal(mean, sd);
        return TimePoint::minutes(t);
      };
      for (int day = 0; day < config.n_days; ++day) {
        for (SlotKind slot : {SlotKind::Morning, SlotKind::Evening}) {
          if (rng.bernoulli(config.missing_day_prob)) continue;
          BehaviorEvent ev;
          ev.participant = id;
          ev.day_index = day;
          ev.slot = slot;
          ev.true_time = slot == SlotKind::Morning
                             ? draw_event_time(morning_mean, kMorningEventLo, kMorningEventHi)
                             : draw_event_time(evening_mean, kEveningEventLo, kEveningEventHi);
          p.events.push_back(std::move(ev));
        }
      }
      if (static_cast<int>(p.events.size()) >= kMinAnalyzableEvents) break;
    }
    ds.participants.push_back(std::move(p));
  }
  validate_dataset(ds);
  return ds;
}

int day_span(const Dataset& dataset) {
  int max_day = -1;
  for (const auto& p : dataset.participants) {
    for (const auto& e : p.events) max_day = std::max(max_day, e.day_index);
  }
  return max_day + 1;
}

}  // namespace sigsched
