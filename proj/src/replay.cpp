#include "sigsched/replay.hpp"

#include <algorithm>

#include "sigsched/residual.hpp"

namespace sigsched {

namespace {

ParticipantPredictions replay_residual_one(const ParticipantData& p, Weekday anchor) {
  ParticipantPredictions out;
  out.participant = p.schedule.participant;
  out.events = analyzable_events(p);
  out.predictions.reserve(out.events.size());
  ResidualState state[2];
  for (const auto& e : out.events) {
    const TimePoint user_time = resolve_user_time(p.schedule, e.day_index, e.slot, anchor);
    ResidualState& slot_state = state[static_cast<int>(e.slot)];
    out.predictions.push_back(predict_residual(slot_state, user_time));
    slot_state = update_residual(slot_state, e.true_time.count() - user_time.count());
  }
  return out;
}

ParticipantPredictions replay_blr_one(const ParticipantData& p, Weekday anchor,
                                      const PriorSpec& prior) {
  ParticipantPredictions out;
  out.participant = p.schedule.participant;
  out.events = analyzable_events(p);
  out.predictions.reserve(out.events.size());

  const DesignRows design = build_design(p, anchor);
  NIGPosterior posterior = NIGPosterior::from_prior(prior);
  std::size_t applied = 0;
  for (std::size_t k = 0; k < out.events.size(); ++k) {
    while (applied < k &&
           out.events[applied].day_index < out.events[k].day_index) {
      const FeatureVector x = design.X.row(static_cast<Eigen::Index>(applied)).transpose();
      posterior = blr_update(posterior, x, design.y(static_cast<Eigen::Index>(applied)));
      ++applied;
    }
    const FeatureVector x = design.X.row(static_cast<Eigen::Index>(k)).transpose();
    out.predictions.push_back(blr_predict(posterior, x));
  }
  return out;
}

void check_grid(Method method, std::span<const double> grid) {
  for (double v : grid) {
    if (method == Method::Sigma && (v < -3.0 || v > 0.0)) {
      throw ValidationError("sigma sweep grid must lie in [-3, 0]");
    }
    if (method == Method::Fixed && (v < -360.0 || v > 0.0)) {
      throw ValidationError("fixed sweep grid must lie in [-360, 0] minutes");
    }
  }
}

}  // namespace

CohortPredictions predict_cohort_residual(const Dataset& dataset) {
  CohortPredictions out;
  out.reserve(dataset.participants.size());
  for (const auto& p : dataset.participants) {
    out.push_back(replay_residual_one(p, dataset.anchor));
  }
  return out;
}

CohortPredictions predict_cohort_blr_lopo(const Dataset& dataset) {
  CohortPredictions out;
  out.reserve(dataset.participants.size());
  for (const auto& split : lopo_splits(dataset)) {
    const PriorSpec prior = elicit_priors(training_subset(dataset, split.test_index));
    out.push_back(replay_blr_one(dataset.participants[split.test_index],
                                 dataset.anchor, prior));
  }
  return out;
}

CohortPredictions predict_cohort_blr(const Dataset& dataset, const PriorSpec& prior) {
  CohortPredictions out;
  out.reserve(dataset.participants.size());
  for (const auto& p : dataset.participants) {
    out.push_back(replay_blr_one(p, dataset.anchor, prior));
  }
  return out;
}

TradeoffCurve sweep(const Dataset& dataset, PredictorKind predictor, Method method,
                    std::span<const double> grid, double threshold) {
  check_grid(method, grid);
  const CohortPredictions predictions = predictor == PredictorKind::Residual
                                            ? predict_cohort_residual(dataset)
                                            : predict_cohort_blr_lopo(dataset);
  return sweep_curve(predictions, method, grid, threshold);
}

std::vector<ScheduleRow> predict_all_slots(const Dataset& dataset,
                                           PredictorKind predictor,
                                           const PriorSpec* prior) {
  if (predictor == PredictorKind::Blr && prior == nullptr) {
    throw InsufficientData("blr scheduling requires an elicited priors file");
  }
  const int n_days = day_span(dataset);
  std::vector<ScheduleRow> rows;
  rows.reserve(static_cast<std::size_t>(n_days) * 2 * dataset.participants.size());

  for (const auto& p : dataset.participants) {
    const std::vector<BehaviorEvent> events = analyzable_events(p);
    if (predictor == PredictorKind::Residual) {
      ResidualState state[2];
      std::size_t next = 0;
      for (int day = 0; day < n_days; ++day) {
        while (next < events.size() && events[next].day_index < day) {
          const auto& e = events[next];
          const TimePoint u = resolve_user_time(p.schedule, e.day_index, e.slot,
                                                dataset.anchor);
          ResidualState& s = state[static_cast<int>(e.slot)];
          s = update_residual(s, e.true_time.count() - u.count());
          ++next;
        }
        for (SlotKind slot : {SlotKind::Morning, SlotKind::Evening}) {
          const TimePoint u = resolve_user_time(p.schedule, day, slot, dataset.anchor);
          rows.push_back({p.schedule.participant, day, slot,
                          predict_residual(state[static_cast<int>(slot)], u)});
        }
      }
    } else {
      const DesignRows design = build_design(p, dataset.anchor);
      NIGPosterior posterior = NIGPosterior::from_prior(*prior);
      std::size_t next = 0;
      for (int day = 0; day < n_days; ++day) {
        while (next < events.size() && events[next].day_index < day) {
          const FeatureVector x = design.X.row(static_cast<Eigen::Index>(next)).transpose();
          posterior = blr_update(posterior, x, design.y(static_cast<Eigen::Index>(next)));
          ++next;
        }
        const std::span<const BehaviorEvent> history(events.data(), next);
        for (SlotKind slot : {SlotKind::Morning, SlotKind::Evening}) {
          const FeatureVector x =
              featurize(history, p.schedule, day, slot, dataset.anchor);
          rows.push_back({p.schedule.participant, day, slot, blr_predict(posterior, x)});
        }
      }
    }
  }
  return rows;
}

}  // namespace sigsched
