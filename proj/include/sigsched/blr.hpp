#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

#include "sigsched/core.hpp"
#include "sigsched/data.hpp"

namespace sigsched {

inline constexpr int kFeatureDim = 14;

using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;

// Fixed regressor layout. Day-of-week is a 6-column one-hot with Monday as
// the baseline; window statistics cover the trailing 7 calendar days of the
// same slot.
namespace feat {
inline constexpr int kIntercept = 0;
inline constexpr int kUserTime = 1;
inline constexpr int kDowFirst = 2;  // Tuesday..Sunday occupy 2..7
inline constexpr int kIsEvening = 8;
inline constexpr int kWindowMin = 9;
inline constexpr int kWindowMax = 10;
inline constexpr int kWindowCv = 11;
inline constexpr int kMostRecent = 12;
inline constexpr int kNoBrushDays = 13;
}  // namespace feat

// Builds the regressor vector for one (day, slot). history must hold only
// events strictly before the target day; with fewer than two same-slot
// events in the window, min/max/most-recent impute to the resolved
// user-provided time and the coefficient of variation to zero.
FeatureVector featurize(std::span<const BehaviorEvent> history,
                        const UserProvidedSchedule& schedule, int day_index,
                        SlotKind slot, Weekday anchor);

// Elicited Gaussian weight priors plus inverse-gamma noise prior.
struct PriorSpec {
  Eigen::VectorXd weight_means;
  Eigen::VectorXd weight_sds;  // all strictly positive
  double noise_shape = 0.0;    // a0 > 1 so the prior noise mean exists
  double noise_scale = 0.0;    // b0 > 0

  void validate() const;  // throws ValidationError
};

std::string prior_spec_to_json(const PriorSpec& prior,
                               const std::vector<std::pair<std::string, std::string>>&
                                   provenance = {});
PriorSpec prior_spec_from_json(const std::string& text);
PriorSpec prior_spec_from_json_file(const std::string& path);

// Normal-Inverse-Gamma joint posterior over weights and noise variance,
// updatable one observation at a time.
struct NIGPosterior {
  Eigen::VectorXd mu;
  Eigen::MatrixXd precision;  // symmetric positive-definite
  double a = 0.0;
  double b = 0.0;
  long n_obs = 0;

  // Prior weight precision is diagonal, scaled so the marginal weight SDs at
  // the prior noise mean equal the elicited weight_sds.
  static NIGPosterior from_prior(const PriorSpec& prior);
};

// Conjugate rank-1 update with one (x, y) observation.
NIGPosterior blr_update(const NIGPosterior& post, const FeatureVector& x, double y);

// Closed-form posterior from full sufficient statistics; testing oracle for
// chained blr_update calls. Works for any design dimension.
NIGPosterior blr_batch(const PriorSpec& prior, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y);

// Plug-in Gaussian predictive: mean mu.x, SD sqrt(sigma2_hat (1 + x' P^-1 x))
// with sigma2_hat = b/(a-1). Throws DegenerateNoise when a <= 1.
PredictionWithUQ blr_predict(const NIGPosterior& post, const FeatureVector& x);

// Regression rows for one participant, featurized causally (each row sees
// only events from earlier days).
struct DesignRows {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};
DesignRows build_design(const ParticipantData& participant, Weekday anchor);

// Intermediate elicitation statistics, exposed so the significance rule can
// be tested directly.
struct ElicitStats {
  Eigen::VectorXd pooled_estimates;
  Eigen::VectorXd p_values;
  Eigen::VectorXd cross_sds;  // SD of per-participant estimates
  double residual_variance = 0.0;
  long pooled_rows = 0;
};

inline constexpr double kSignificanceAlpha = 0.05;
inline constexpr double kNoisePriorShape = 3.0;
inline constexpr double kMinWeightSd = 1e-6;
inline constexpr double kMinNoiseScale = 1e-9;

// Pooled least squares for point estimates and p-values; per-participant
// least squares for the cross-participant SDs. Rank-deficient designs fall
// back to ridge with penalty 1e-6 * trace(X'X) / d.
ElicitStats elicit_stats(const Dataset& training);

// Significant coefficients keep the pooled estimate and full SD; the rest
// get mean zero and half the SD. a0 = 3, b0 = 2 * pooled residual variance.
PriorSpec priors_from_stats(const ElicitStats& stats);

PriorSpec elicit_priors(const Dataset& training);

// Solves A z = rhs for symmetric positive-definite A (Jacobi-equilibrated
// Cholesky). Throws NumericalFailure when the factorization fails.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs);

}  // namespace sigsched
