#include "sigsched/residual.hpp"

#include <cmath>

namespace sigsched {

double residual_sd(const ResidualState& state) {
  if (state.m < 2) return 0.0;
  return std::sqrt(state.m2 / static_cast<double>(state.m - 1));
}

PredictionWithUQ predict_residual(const ResidualState& state, TimePoint user_time) {
  PredictionWithUQ pred;
  pred.t_hat = user_time;
  if (state.m >= 2) {
    const double m = static_cast<double>(state.m);
    pred.sigma = residual_sd(state) * std::sqrt(1.0 + 1.0 / m);
  }
  return pred;
}

ResidualState update_residual(ResidualState state, double error_min) {
  if (!std::isfinite(error_min)) {
    throw ValidationError("residual error must be finite");
  }
  state.m += 1;
  const double delta = error_min - state.mean_err;
  state.mean_err += delta / static_cast<double>(state.m);
  state.m2 += delta * (error_min - state.mean_err);
  return state;
}

}  // namespace sigsched
