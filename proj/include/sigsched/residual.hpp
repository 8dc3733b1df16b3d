#pragma once

#include "sigsched/core.hpp"

namespace sigsched {

// Running moments of past prediction errors for one (participant, slot)
// stream. Single-pass (Welford) form: m observations, running mean, and the
// sum of squared deviations m2.
struct ResidualState {
  long m = 0;
  double mean_err = 0.0;
  double m2 = 0.0;
};

// Forecast is the resolved user-provided time; uncertainty is the
// prediction-interval standard error from the m errors observed so far:
// sigma = s_eps * sqrt(1 + 1/m), with s_eps the sample SD of the errors.
// Fewer than two errors give sigma = 0 (cold start).
PredictionWithUQ predict_residual(const ResidualState& state, TimePoint user_time);

// Folds one observed error (true - predicted, minutes) into the stream.
ResidualState update_residual(ResidualState state, double error_min);

// Sample SD of the accumulated errors; 0 when m < 2.
double residual_sd(const ResidualState& state);

}  // namespace sigsched
