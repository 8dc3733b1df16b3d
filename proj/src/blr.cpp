#include "sigsched/blr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

namespace sigsched {

namespace {

constexpr double kRidgeScale = 1e-6;

struct WindowStats {
  int count = 0;
  double min = 0.0;
  double max = 0.0;
  double cv = 0.0;
  double most_recent = 0.0;
};

WindowStats window_stats(std::span<const BehaviorEvent> history, int day_index,
                         SlotKind slot) {
  WindowStats w;
  double sum = 0.0, sum_sq = 0.0;
  int most_recent_day = std::numeric_limits<int>::min();
  for (const auto& e : history) {
    if (e.slot != slot) continue;
    if (e.day_index < day_index - 7 || e.day_index >= day_index) continue;
    const double t = e.true_time.count();
    if (w.count == 0) {
      w.min = w.max = t;
    } else {
      w.min = std::min(w.min, t);
      w.max = std::max(w.max, t);
    }
    if (e.day_index > most_recent_day) {
      most_recent_day = e.day_index;
      w.most_recent = t;
    }
    sum += t;
    sum_sq += t * t;
    ++w.count;
  }
  if (w.count >= 2) {
    const double n = w.count;
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    w.cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
  }
  return w;
}

int no_brush_days(std::span<const BehaviorEvent> history, int day_index) {
  bool brushed[7] = {};
  for (const auto& e : history) {
    const int offset = day_index - 1 - e.day_index;
    if (offset >= 0 && offset < 7) brushed[offset] = true;
  }
  int count = 0;
  for (bool b : brushed) {
    if (!b) ++count;
  }
  return count;
}

struct LeastSquaresFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd standard_errors;
  double sigma2 = 0.0;  // residual variance, RSS / (n - d)
  bool ridged = false;
};

LeastSquaresFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  LeastSquaresFit fit;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  Eigen::MatrixXd xtx = X.transpose() * X;
  if (qr.rank() == d) {
    fit.beta = qr.solve(y);
  } else {
    // Short or collinear histories; ridge keeps the fit defined.
    const double lambda = kRidgeScale * xtx.trace() / static_cast<double>(d);
    xtx.diagonal().array() += lambda;
    fit.beta = spd_solve(xtx, X.transpose() * y);
    fit.ridged = true;
  }

  const double rss = (y - X * fit.beta).squaredNorm();
  const double dof = static_cast<double>(n - d);
  fit.sigma2 = dof > 0.0 ? rss / dof : 0.0;

  fit.standard_errors.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(d);
    ej(j) = 1.0;
    const double inv_jj = spd_solve(xtx, ej)(j);
    fit.standard_errors(j) = std::sqrt(std::max(0.0, fit.sigma2 * inv_jj));
  }
  return fit;
}

double two_sided_p_value(double estimate, double standard_error, double dof) {
  if (!(standard_error > 0.0)) return estimate != 0.0 ? 0.0 : 1.0;
  const boost::math::students_t_distribution<double> dist(dof);
  const double t = std::abs(estimate / standard_error);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

}  // namespace

Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double diag = A(i, i);
    if (!(diag > 0.0)) {
      throw NumericalFailure("matrix diagonal not positive; not SPD");
    }
    scale(i) = 1.0 / std::sqrt(diag);
  }
  const Eigen::MatrixXd scaled =
      scale.asDiagonal() * A * scale.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("Cholesky factorization failed; matrix not SPD");
  }
  const Eigen::VectorXd z = llt.solve((scale.asDiagonal() * rhs).eval());
  return scale.asDiagonal() * z;
}

FeatureVector featurize(std::span<const BehaviorEvent> history,
                        const UserProvidedSchedule& schedule, int day_index,
                        SlotKind slot, Weekday anchor) {
  const double user_time = resolve_user_time(schedule, day_index, slot, anchor).count();

  FeatureVector x = FeatureVector::Zero();
  x(feat::kIntercept) = 1.0;
  x(feat::kUserTime) = user_time;
  const Weekday wd = weekday_on(anchor, day_index);
  if (wd != Weekday::Monday) {
    x(feat::kDowFirst + static_cast<int>(wd) - 1) = 1.0;
  }
  x(feat::kIsEvening) = slot == SlotKind::Evening ? 1.0 : 0.0;

  const WindowStats w = window_stats(history, day_index, slot);
  if (w.count >= 2) {
    x(feat::kWindowMin) = w.min;
    x(feat::kWindowMax) = w.max;
    x(feat::kWindowCv) = w.cv;
    x(feat::kMostRecent) = w.most_recent;
  } else {
    x(feat::kWindowMin) = user_time;
    x(feat::kWindowMax) = user_time;
    x(feat::kWindowCv) = 0.0;
    x(feat::kMostRecent) = user_time;
  }
  x(feat::kNoBrushDays) = no_brush_days(history, day_index);
  return x;
}

void PriorSpec::validate() const {
  if (weight_means.size() == 0 || weight_means.size() != weight_sds.size()) {
    throw ValidationError("prior weight vectors empty or mismatched");
  }
  if ((weight_sds.array() <= 0.0).any()) {
    throw ValidationError("prior weight SDs must be strictly positive");
  }
  if (!(noise_shape > 1.0)) {
    throw ValidationError("noise_shape must exceed 1 so the prior noise mean exists");
  }
  if (!(noise_scale > 0.0)) {
    throw ValidationError("noise_scale must be positive");
  }
}

std::string prior_spec_to_json(
    const PriorSpec& prior,
    const std::vector<std::pair<std::string, std::string>>& provenance) {
  nlohmann::json doc;
  doc["weight_means"] = std::vector<double>(
      prior.weight_means.data(), prior.weight_means.data() + prior.weight_means.size());
  doc["weight_sds"] = std::vector<double>(
      prior.weight_sds.data(), prior.weight_sds.data() + prior.weight_sds.size());
  doc["noise_shape"] = prior.noise_shape;
  doc["noise_scale"] = prior.noise_scale;
  for (const auto& [key, value] : provenance) doc[key] = value;
  return doc.dump(2);
}

PriorSpec prior_spec_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid priors JSON: ") + e.what());
  }
  PriorSpec prior;
  try {
    const auto means = doc.at("weight_means").get<std::vector<double>>();
    const auto sds = doc.at("weight_sds").get<std::vector<double>>();
    prior.weight_means = Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
    prior.weight_sds = Eigen::Map<const Eigen::VectorXd>(sds.data(), sds.size());
    prior.noise_shape = doc.at("noise_shape").get<double>();
    prior.noise_scale = doc.at("noise_scale").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad priors JSON: ") + e.what());
  }
  prior.validate();
  return prior;
}

PriorSpec prior_spec_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open priors file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return prior_spec_from_json(text);
}

NIGPosterior NIGPosterior::from_prior(const PriorSpec& prior) {
  prior.validate();
  NIGPosterior post;
  post.mu = prior.weight_means;
  const double noise_mean = prior.noise_scale / (prior.noise_shape - 1.0);
  post.precision =
      (noise_mean * prior.weight_sds.array().square().inverse()).matrix().asDiagonal();
  post.a = prior.noise_shape;
  post.b = prior.noise_scale;
  post.n_obs = 0;
  return post;
}

NIGPosterior blr_update(const NIGPosterior& post, const FeatureVector& x, double y) {
  NIGPosterior out;
  out.precision = post.precision + x * x.transpose();
  out.mu = spd_solve(out.precision, post.precision * post.mu + x * y);
  out.a = post.a + 0.5;
  // b increment in product form: both factors are O(residual), avoiding the
  // cancellation of the y^2 + mu'Pmu - mu''P'mu'' expression.
  const double res_before = y - x.dot(post.mu);
  const double res_after = y - x.dot(out.mu);
  out.b = post.b + 0.5 * res_before * res_after;
  if (!(out.b > 0.0)) {
    throw NumericalFailure("posterior noise scale collapsed to <= 0");
  }
  out.n_obs = post.n_obs + 1;
  return out;
}

NIGPosterior blr_batch(const PriorSpec& prior, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw ValidationError("design rows and target length differ");
  }
  NIGPosterior post = NIGPosterior::from_prior(prior);
  if (X.rows() == 0) return post;
  if (X.cols() != post.mu.size()) {
    throw ValidationError("design width does not match prior dimension");
  }

  const Eigen::MatrixXd prior_precision = post.precision;
  const Eigen::VectorXd prior_mu = post.mu;
  post.precision += X.transpose() * X;
  post.mu = spd_solve(post.precision, prior_precision * prior_mu + X.transpose() * y);
  post.a += 0.5 * static_cast<double>(X.rows());
  post.b += 0.5 * ((y - X * post.mu).dot(y) +
                   (prior_mu - post.mu).dot(prior_precision * prior_mu));
  if (!(post.b > 0.0)) {
    throw NumericalFailure("posterior noise scale collapsed to <= 0");
  }
  post.n_obs = X.rows();
  return post;
}

PredictionWithUQ blr_predict(const NIGPosterior& post, const FeatureVector& x) {
  if (!(post.a > 1.0)) {
    throw DegenerateNoise("posterior noise mean undefined (a <= 1)");
  }
  const double sigma2_hat = post.b / (post.a - 1.0);
  const double quad = std::max(0.0, x.dot(spd_solve(post.precision, x)));
  double mean = post.mu.dot(x);
  // Linear extrapolation can leave the representable day window.
  mean = std::clamp(mean, TimePoint::kMin,
                    std::nextafter(TimePoint::kMax, TimePoint::kMin));
  PredictionWithUQ pred;
  pred.t_hat = TimePoint::minutes(mean);
  pred.sigma = std::sqrt(sigma2_hat * (1.0 + quad));
  return pred;
}

DesignRows build_design(const ParticipantData& participant, Weekday anchor) {
  const std::vector<BehaviorEvent> events = analyzable_events(participant);
  DesignRows rows;
  rows.X.resize(static_cast<Eigen::Index>(events.size()), kFeatureDim);
  rows.y.resize(static_cast<Eigen::Index>(events.size()));
  // History visible when scheduling day d: events from days strictly before d
  // (behavior data arrives once per night, so same-day events are not usable).
  std::size_t visible = 0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    while (visible < k && events[visible].day_index < events[k].day_index) {
      ++visible;
    }
    const std::span<const BehaviorEvent> history(events.data(), visible);
    rows.X.row(static_cast<Eigen::Index>(k)) =
        featurize(history, participant.schedule, events[k].day_index,
                  events[k].slot, anchor)
            .transpose();
    rows.y(static_cast<Eigen::Index>(k)) = events[k].true_time.count();
  }
  return rows;
}

ElicitStats elicit_stats(const Dataset& training) {
  const std::size_t n_participants = training.participants.size();
  if (n_participants < 2) {
    throw InsufficientData("prior elicitation needs >= 2 training participants");
  }

  std::vector<DesignRows> designs;
  designs.reserve(n_participants);
  Eigen::Index total_rows = 0;
  for (const auto& p : training.participants) {
    DesignRows rows = build_design(p, training.anchor);
    if (rows.X.rows() < kFeatureDim + 2) {
      throw InsufficientData("participant " + p.schedule.participant + " has " +
                             std::to_string(rows.X.rows()) +
                             " usable events; elicitation needs >= " +
                             std::to_string(kFeatureDim + 2));
    }
    total_rows += rows.X.rows();
    designs.push_back(std::move(rows));
  }

  Eigen::MatrixXd X(total_rows, kFeatureDim);
  Eigen::VectorXd y(total_rows);
  Eigen::Index offset = 0;
  for (const auto& rows : designs) {
    X.middleRows(offset, rows.X.rows()) = rows.X;
    y.segment(offset, rows.y.size()) = rows.y;
    offset += rows.X.rows();
  }

  const LeastSquaresFit pooled = least_squares(X, y);

  Eigen::MatrixXd per_participant(static_cast<Eigen::Index>(n_participants),
                                  kFeatureDim);
  for (std::size_t i = 0; i < designs.size(); ++i) {
    per_participant.row(static_cast<Eigen::Index>(i)) =
        least_squares(designs[i].X, designs[i].y).beta.transpose();
  }

  ElicitStats stats;
  stats.pooled_estimates = pooled.beta;
  stats.residual_variance = pooled.sigma2;
  stats.pooled_rows = total_rows;
  stats.p_values.resize(kFeatureDim);
  stats.cross_sds.resize(kFeatureDim);
  const double dof = static_cast<double>(total_rows - kFeatureDim);
  for (int j = 0; j < kFeatureDim; ++j) {
    stats.p_values(j) =
        two_sided_p_value(pooled.beta(j), pooled.standard_errors(j), dof);
    const Eigen::VectorXd col = per_participant.col(j);
    const double mean = col.mean();
    stats.cross_sds(j) = std::sqrt((col.array() - mean).square().sum() /
                                   static_cast<double>(col.size() - 1));
  }
  return stats;
}

PriorSpec priors_from_stats(const ElicitStats& stats) {
  const Eigen::Index d = stats.pooled_estimates.size();
  PriorSpec prior;
  prior.weight_means.resize(d);
  prior.weight_sds.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const bool significant = stats.p_values(j) < kSignificanceAlpha;
    prior.weight_means(j) = significant ? stats.pooled_estimates(j) : 0.0;
    const double sd = significant ? stats.cross_sds(j) : 0.5 * stats.cross_sds(j);
    prior.weight_sds(j) = std::max(sd, kMinWeightSd);
  }
  prior.noise_shape = kNoisePriorShape;
  prior.noise_scale = std::max(2.0 * stats.residual_variance, kMinNoiseScale);
  prior.validate();
  return prior;
}

PriorSpec elicit_priors(const Dataset& training) {
  return priors_from_stats(elicit_stats(training));
}

}  // namespace sigsched
