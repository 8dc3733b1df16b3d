#include "sigsched/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace sigsched {

ParticipantMetrics participant_metrics(std::span<const DecisionPoint> dps,
                                       std::span<const BehaviorEvent> events) {
  if (events.empty()) {
    throw EmptyInput("participant has no analyzable events");
  }
  if (dps.size() != events.size()) {
    throw ValidationError("decision points and events are not aligned");
  }
  ParticipantMetrics m;
  m.participant = events.front().participant;
  m.analyzed = static_cast<int>(events.size());
  double delay_sum = 0.0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (dps[k].day_index != events[k].day_index || dps[k].slot != events[k].slot) {
      throw ValidationError("decision point/event (day, slot) mismatch");
    }
    const double t_k = dps[k].time.count();
    const double t_star = events[k].true_time.count();
    if (t_k < t_star) {  // strict: a tie is not covered
      ++m.covered;
      delay_sum += t_star - t_k;
    }
  }
  m.coverage = static_cast<double>(m.covered) / static_cast<double>(m.analyzed);
  if (m.covered > 0) m.mean_delay_min = delay_sum / m.covered;
  return m;
}

TradeoffPoint cohort_point(const std::vector<ParticipantMetrics>& metrics,
                           double threshold) {
  if (metrics.empty()) {
    throw EmptyInput("cohort point needs at least one participant");
  }
  TradeoffPoint point;
  int meeting = 0;
  int with_delay = 0;
  double delay_sum_min = 0.0;
  for (const auto& m : metrics) {
    if (m.coverage >= threshold) ++meeting;
    if (m.mean_delay_min) {
      delay_sum_min += *m.mean_delay_min;
      ++with_delay;
    }
  }
  point.proportion_meeting =
      static_cast<double>(meeting) / static_cast<double>(metrics.size());
  point.mean_delay_hours =
      with_delay > 0 ? delay_sum_min / with_delay / 60.0 : 0.0;
  return point;
}

std::vector<ParticipantMetrics> replay_metrics(const CohortPredictions& cohort,
                                               Method method, double parameter,
                                               std::vector<DecisionPoint>* dps_out) {
  std::vector<ParticipantMetrics> metrics;
  metrics.reserve(cohort.size());
  std::vector<DecisionPoint> dps;
  for (const auto& participant : cohort) {
    dps.clear();
    dps.reserve(participant.events.size());
    for (std::size_t k = 0; k < participant.events.size(); ++k) {
      const auto& event = participant.events[k];
      DecisionPoint dp =
          method == Method::Sigma
              ? schedule_sigma(participant.predictions[k], SigmaPolicy{parameter},
                               event.slot)
              : schedule_fixed(participant.predictions[k].t_hat,
                               FixedPolicy{parameter}, event.slot);
      dp.participant = event.participant;
      dp.day_index = event.day_index;
      dps.push_back(dp);
    }
    metrics.push_back(participant_metrics(dps, participant.events));
    if (dps_out) dps_out->insert(dps_out->end(), dps.begin(), dps.end());
  }
  return metrics;
}

TradeoffCurve sweep_curve(const CohortPredictions& cohort, Method method,
                          std::span<const double> grid, double threshold) {
  TradeoffCurve curve;
  curve.method = method;
  curve.threshold = threshold;
  curve.points.reserve(grid.size());
  for (double parameter : grid) {
    TradeoffPoint point = cohort_point(replay_metrics(cohort, method, parameter),
                                       threshold);
    point.parameter = parameter;
    curve.points.push_back(point);
  }
  return curve;
}

namespace {

// Area of the positive part of a linear segment (exact: the segment is
// split where it crosses zero, so trapezoids introduce no error).
double positive_trapezoid(double x0, double h0, double x1, double h1) {
  const double width = x1 - x0;
  if (width <= 0.0) return 0.0;
  if (h0 <= 0.0 && h1 <= 0.0) return 0.0;
  if (h0 >= 0.0 && h1 >= 0.0) return 0.5 * (h0 + h1) * width;
  if (h0 > 0.0) return 0.5 * h0 * width * h0 / (h0 - h1);
  return 0.5 * h1 * width * h1 / (h1 - h0);
}

}  // namespace

double auc(const TradeoffCurve& curve) {
  if (curve.points.empty()) {
    throw EmptyInput("auc needs a nonempty curve");
  }
  // Height above the floor, in percentage points, as a function of delay.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const auto& p : curve.points) {
    pts.emplace_back(p.mean_delay_hours,
                     p.proportion_meeting * 100.0 - kAucFloorPercent);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  constexpr double kEnd = kAucMaxDelayHours;
  double area = 0.0;

  // Constant head: from 0 to the first point (first value extrapolated).
  area += positive_trapezoid(0.0, pts.front().second,
                             std::min(pts.front().first, kEnd), pts.front().second);

  // Interior linear segments, clipped to [0, kEnd].
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [x0, h0] = pts[i];
    const auto [x1, h1] = pts[i + 1];
    if (x1 <= x0 || x1 <= 0.0 || x0 >= kEnd) continue;
    const double cx0 = std::max(x0, 0.0);
    const double cx1 = std::min(x1, kEnd);
    const double slope = (h1 - h0) / (x1 - x0);
    area += positive_trapezoid(cx0, h0 + slope * (cx0 - x0), cx1,
                               h0 + slope * (cx1 - x0));
  }

  // Constant tail: from the last point to kEnd (last value extrapolated).
  if (pts.back().first < kEnd) {
    area += positive_trapezoid(std::max(pts.back().first, 0.0), pts.back().second,
                               kEnd, pts.back().second);
  }
  return std::clamp(area, 0.0, (100.0 - kAucFloorPercent) * kAucMaxDelayHours);
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> grid;
  if (count <= 1) {
    grid.push_back(lo);
    return grid;
  }
  grid.reserve(count);
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    grid.push_back(i + 1 == count ? hi : lo + step * i);
  }
  return grid;
}

std::vector<double> default_sigma_grid() { return linspace(-3.0, 0.0, 31); }

std::vector<double> default_fixed_grid() { return linspace(-360.0, 0.0, 37); }

std::vector<double> default_thresholds() {
  return {0.66, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.99};
}

}  // namespace sigsched
