// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Invoked as:
//   sigsched_acceptance <path-to-sigsched-cli> <cohort_a-config.json> <workdir>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigsched/blr.hpp"
#include "sigsched/cli.hpp"
#include "sigsched/csv.hpp"
#include "sigsched/data.hpp"
#include "sigsched/evaluation.hpp"
#include "sigsched/replay.hpp"
#include "sigsched/residual.hpp"
#include "sigsched/rng.hpp"
#include "sigsched/scheduler.hpp"

#include "test_helpers.hpp"

using namespace sigsched;
using namespace sigsched::testing;

namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_config;
fs::path g_work;
int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << criterion << " ("
            << name << "): " << detail << "\n";
  if (!pass) ++g_failures;
}

std::string fmt(double v) { return csv::format_double(v); }

int run_cli(const std::string& args) {
  const std::string cmd =
      "\"" + g_cli + "\" " + args + " >> \"" + (g_work / "cli.log").string() +
      "\" 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// --- criterion 1: residual-predictor coverage calibration -------------------

Dataset single_participant_stream(double noise_sd, int n_events,
                                  std::uint64_t seed) {
  Dataset ds;
  ds.anchor = Weekday::Monday;
  ParticipantData p;
  p.schedule = make_schedule("CAL", 900.0, 1260.0, 900.0, 1320.0);
  SeededRng rng(seed);
  for (int day = 0; day < n_events; ++day) {
    double t = rng.normal(900.0, noise_sd);
    while (!(t > 0.0 && t < 1800.0)) t = rng.normal(900.0, noise_sd);
    p.events.push_back(make_event("CAL", day, SlotKind::Morning, t));
  }
  ds.participants.push_back(std::move(p));
  return ds;
}

void criterion_1() {
  Timer timer;
  bool pass = true;
  std::ostringstream detail;
  const int n_events = 6000;
  int idx = 0;
  for (double sd : {15.0, 60.0, 180.0}) {
    const Dataset ds = single_participant_stream(sd, n_events, 1000 + idx++);
    const CohortPredictions preds = predict_cohort_residual(ds);
    for (auto [c, nominal] : {std::pair{-1.2816, 0.90}, std::pair{0.0, 0.50}}) {
      const double coverage = replay_metrics(preds, Method::Sigma, c)[0].coverage;
      const double target = normal_cdf(-c);
      if (std::abs(coverage - nominal) > 0.02) pass = false;
      detail << "sd=" << fmt(sd) << " c=" << fmt(c) << " coverage=" << fmt(coverage)
             << " (nominal " << fmt(target) << "); ";
    }
  }
  const double elapsed = timer.seconds();
  if (elapsed >= 5.0) pass = false;
  detail << "elapsed " << fmt(elapsed) << "s";
  report(1, "coverage calibration", pass, detail.str());
}

// --- criterion 2: sequential posterior matches the batch oracle -------------

void criterion_2() {
  Timer timer;
  SeededRng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 50.0));
    PriorSpec prior;
    prior.weight_means.resize(kFeatureDim);
    prior.weight_sds.resize(kFeatureDim);
    for (int j = 0; j < kFeatureDim; ++j) {
      prior.weight_means(j) = rng.normal(0.0, 2.0);
      prior.weight_sds(j) = rng.uniform(0.2, 4.0);
    }
    prior.noise_shape = rng.uniform(1.5, 6.0);
    prior.noise_scale = rng.uniform(0.3, 5.0);

    Eigen::MatrixXd X(n, kFeatureDim);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < kFeatureDim; ++j) X(i, j) = rng.normal(0.0, 1.0);
      y(i) = rng.normal(0.0, 2.0);
    }

    NIGPosterior seq = NIGPosterior::from_prior(prior);
    for (int i = 0; i < n; ++i) {
      seq = blr_update(seq, FeatureVector(X.row(i).transpose()), y(i));
    }
    const NIGPosterior batch = blr_batch(prior, X, y);

    worst = std::max(worst, (seq.mu - batch.mu).norm() /
                                std::max(1e-12, batch.mu.norm()));
    worst = std::max(worst, (seq.precision - batch.precision).norm() /
                                batch.precision.norm());
    worst = std::max(worst, std::abs(seq.a - batch.a) / batch.a);
    worst = std::max(worst, std::abs(seq.b - batch.b) / batch.b);
  }
  const double elapsed = timer.seconds();
  const bool pass = worst < 1e-8 && elapsed < 5.0;
  report(2, "sequential/batch posterior equivalence", pass,
         "worst relative gap " + fmt(worst) + " over 100 instances, elapsed " +
             fmt(elapsed) + "s");
}

// --- criterion 3: online residual SD matches the two-pass oracle ------------

void criterion_3() {
  Timer timer;
  SeededRng rng(88);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 300.0));
    std::vector<double> errors;
    errors.reserve(n);
    const double scale = rng.uniform(0.5, 240.0);
    const double shift = rng.normal(0.0, 60.0);
    ResidualState state;
    for (int i = 0; i < n; ++i) {
      errors.push_back(shift + rng.normal(0.0, scale));
      state = update_residual(state, errors.back());
    }
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= n;
    double ss = 0.0;
    for (double e : errors) ss += (e - mean) * (e - mean);
    const double oracle = std::sqrt(ss / (n - 1));
    worst = std::max(worst, std::abs(residual_sd(state) - oracle) /
                                std::max(1e-12, oracle));
  }
  const double elapsed = timer.seconds();
  const bool pass = worst < 1e-9 && elapsed < 2.0;
  report(3, "online residual SD vs two-pass oracle", pass,
         "worst relative gap " + fmt(worst) + " over 1000 streams, elapsed " +
             fmt(elapsed) + "s");
}

// --- criterion 4: constant-sigma scheduler equivalence ----------------------

void criterion_4() {
  SeededRng rng(99);
  const double sigma_bar = 60.0;
  CohortPredictions cohort;
  for (int i = 0; i < 20; ++i) {
    ParticipantPredictions pp;
    pp.participant = "E" + std::to_string(i + 1);
    const double user_time = rng.uniform(480.0, 720.0);
    const double noise_sd = rng.uniform(10.0, 120.0);
    for (int k = 0; k < 60; ++k) {
      double t = rng.normal(user_time, noise_sd);
      while (!(t >= 240.0 && t < 840.0)) t = rng.normal(user_time, noise_sd);
      pp.events.push_back(make_event(pp.participant, k, SlotKind::Morning, t));
      pp.predictions.push_back({TimePoint::minutes(user_time), sigma_bar});
    }
    cohort.push_back(std::move(pp));
  }

  const std::vector<double> grid_c = default_sigma_grid();
  std::vector<double> grid_f;
  for (double c : grid_c) grid_f.push_back(c * sigma_bar);

  bool pass = true;
  double worst = 0.0;
  for (double threshold : {0.8, 0.9}) {
    const TradeoffCurve sig = sweep_curve(cohort, Method::Sigma, grid_c, threshold);
    const TradeoffCurve fix = sweep_curve(cohort, Method::Fixed, grid_f, threshold);
    if (sig.points.size() != fix.points.size()) {
      pass = false;
      continue;
    }
    for (std::size_t i = 0; i < sig.points.size(); ++i) {
      worst = std::max(worst, std::abs(sig.points[i].mean_delay_hours -
                                       fix.points[i].mean_delay_hours));
      worst = std::max(worst, std::abs(sig.points[i].proportion_meeting -
                                       fix.points[i].proportion_meeting));
    }
    worst = std::max(worst, std::abs(auc(sig) - auc(fix)));
  }
  pass = pass && worst < 1e-9;
  report(4, "constant-sigma curve equivalence", pass,
         "max |sigma - fixed| over curve rows and AUC: " + fmt(worst));
}

// --- criterion 5: clipping floors hold across all sweeps --------------------

void criterion_5(const Dataset& cohort_a,
                 const CohortPredictions& residual_preds,
                 const CohortPredictions& blr_preds) {
  double min_morning = 1e18, min_evening = 1e18;
  long scanned = 0;
  for (const CohortPredictions* preds : {&residual_preds, &blr_preds}) {
    for (Method method : {Method::Sigma, Method::Fixed}) {
      const std::vector<double>& grid =
          method == Method::Sigma ? default_sigma_grid() : default_fixed_grid();
      for (double parameter : grid) {
        std::vector<DecisionPoint> dps;
        replay_metrics(*preds, method, parameter, &dps);
        for (const auto& dp : dps) {
          ++scanned;
          if (dp.slot == SlotKind::Morning) {
            min_morning = std::min(min_morning, dp.time.count());
          } else {
            min_evening = std::min(min_evening, dp.time.count());
          }
        }
      }
    }
  }

  // CLI surface: schedule.csv at the most aggressive parameters.
  const fs::path data_dir = g_work / "cohort_a";
  const fs::path sched = g_work / "clip_schedule.csv";
  bool cli_ok =
      run_cli("schedule --data \"" + data_dir.string() +
              "\" --predictor residual --method sigma --c -3 --out \"" +
              sched.string() + "\"") == 0;
  if (cli_ok) {
    const csv::Table table = csv::read_file(sched.string());
    const auto slot_col = table.column_index("slot");
    const auto time_col = table.column_index("scheduled_min");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const double t = csv::parse_double(table.rows[r][time_col], 0, "scheduled_min");
      const double floor_min =
          table.rows[r][slot_col] == "morning" ? 240.0 : 960.0;
      if (t < floor_min) cli_ok = false;
      ++scanned;
    }
  }

  const bool pass = cli_ok && min_morning >= 240.0 && min_evening >= 960.0;
  report(5, "clipping floors", pass,
         "scanned " + std::to_string(scanned) + " decision points; min morning " +
             fmt(min_morning) + ", min evening " + fmt(min_evening));
  (void)cohort_a;
}

// --- criterion 6: AUC anchors ------------------------------------------------

void criterion_6() {
  auto curve_of = [](std::vector<std::pair<double, double>> pts) {
    TradeoffCurve curve;
    for (auto [d, p] : pts) curve.points.push_back({0.0, d, p});
    return curve;
  };
  const double full = auc(curve_of({{1.0, 1.0}, {4.0, 1.0}}));
  const double floor50 = auc(curve_of({{1.0, 0.5}, {4.0, 0.5}}));
  const double single = auc(curve_of({{2.0, 0.8}}));
  const bool pass = full == 250.0 && floor50 == 0.0 && single == 150.0;
  report(6, "AUC bounds and anchors", pass,
         "constant-100% -> " + fmt(full) + ", constant-50% -> " + fmt(floor50) +
             ", single (2h, 80%) -> " + fmt(single));
}

// --- criterion 7: cohort-A trend analogue ------------------------------------

void criterion_7(const CohortPredictions& residual_preds,
                 const CohortPredictions& blr_preds, double prep_seconds) {
  Timer timer;
  bool pass = true;
  std::ostringstream detail;
  for (auto [name, preds] :
       {std::pair{"residual", &residual_preds}, std::pair{"blr", &blr_preds}}) {
    for (double threshold : {0.85, 0.90, 0.95}) {
      const double auc_sigma =
          auc(sweep_curve(*preds, Method::Sigma, default_sigma_grid(), threshold));
      const double auc_fixed =
          auc(sweep_curve(*preds, Method::Fixed, default_fixed_grid(), threshold));
      if (!(auc_sigma > auc_fixed)) pass = false;
      detail << name << "@" << fmt(threshold) << " sigma=" << fmt(auc_sigma)
             << " fixed=" << fmt(auc_fixed) << "; ";
    }
  }
  const double elapsed = timer.seconds() + prep_seconds;
  if (elapsed >= 120.0) pass = false;
  detail << "total sweep time " << fmt(elapsed) << "s";
  report(7, "cohort-A AUC trend (sigma > fixed at high coverage)", pass,
         detail.str());
}

// --- criterion 8: noiseless recovery -----------------------------------------

void criterion_8() {
  bool pass = true;
  std::ostringstream detail;

  const Dataset cohort = make_linear_cohort(3, 40, Weekday::Monday);
  const Eigen::VectorXd w = noiseless_weights();
  const ElicitStats stats = elicit_stats(cohort);
  const double weight_gap = (stats.pooled_estimates - w).cwiseAbs().maxCoeff();
  if (weight_gap >= 1e-6) pass = false;
  detail << "max weight gap " << fmt(weight_gap);

  const PriorSpec prior = priors_from_stats(stats);
  double pred_gap = 0.0;
  for (const auto& participant : cohort.participants) {
    const DesignRows design = build_design(participant, cohort.anchor);
    const NIGPosterior post = blr_batch(prior, design.X, design.y);
    for (Eigen::Index i = 0; i < design.X.rows(); ++i) {
      const auto pred = blr_predict(post, FeatureVector(design.X.row(i).transpose()));
      pred_gap = std::max(pred_gap, std::abs(pred.t_hat.count() - design.y(i)));
    }
  }
  if (pred_gap >= 1e-6) pass = false;
  detail << ", max training-row prediction gap " << fmt(pred_gap);
  report(8, "noiseless elicitation and fit recovery", pass, detail.str());
}

// --- criterion 9: byte-identical reruns --------------------------------------

void criterion_9() {
  bool pass = true;
  std::ostringstream detail;

  // small cohort keeps the sweep fast; every command is exercised
  const fs::path dir = g_work / "determinism";
  fs::create_directories(dir);
  {
    SynthConfig config;
    config.n_participants = 8;
    config.n_days = 30;
    config.sd_lo = 20.0;
    config.sd_hi = 150.0;
    config.reporting_bias_sd = 15.0;
    config.heavy_tail_mix = 0.15;
    config.tail_scale = 3.0;
    config.missing_day_prob = 0.1;
    config.seed = 5;
    config.name = "determinism";
    std::ofstream out(dir / "config.json");
    out << synth_config_to_json(config);
  }

  const std::string data = (dir / "data").string();
  auto rerun_and_compare = [&](const std::string& label, const std::string& args,
                               const std::vector<fs::path>& outputs) {
    if (run_cli(args) != 0) {
      pass = false;
      detail << label << ": first run failed; ";
      return;
    }
    std::vector<std::string> first;
    first.reserve(outputs.size());
    for (const auto& f : outputs) first.push_back(slurp(f));
    if (run_cli(args) != 0) {
      pass = false;
      detail << label << ": second run failed; ";
      return;
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (first[i].empty() || first[i] != slurp(outputs[i])) {
        pass = false;
        detail << label << ": " << outputs[i].filename().string() << " differs; ";
      }
    }
    detail << label << " ok; ";
  };

  rerun_and_compare("synth",
                    "synth --config \"" + (dir / "config.json").string() +
                        "\" --out \"" + data + "\"",
                    {fs::path(data) / "events.csv", fs::path(data) / "schedules.csv",
                     fs::path(data) / "dataset-meta.json"});
  rerun_and_compare("elicit",
                    "elicit --data \"" + data + "\" --holdout P001 --out \"" +
                        (dir / "priors.json").string() + "\"",
                    {dir / "priors.json"});
  rerun_and_compare("schedule",
                    "schedule --data \"" + data +
                        "\" --predictor residual --method sigma --c -1.5 --out \"" +
                        (dir / "schedule.csv").string() + "\"",
                    {dir / "schedule.csv"});
  rerun_and_compare("sweep",
                    "sweep --data \"" + data +
                        "\" --predictor residual --thresholds 0.9 --grid-c -3:0:7 "
                        "--grid-f -360:0:7 --out \"" +
                        (dir / "sweep").string() + "\"",
                    {dir / "sweep" / "curves.csv", dir / "sweep" / "auc.csv"});

  report(9, "byte-identical reruns", pass, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: sigsched_acceptance <cli-binary> <cohort-config> <workdir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_config = argv[2];
  g_work = argv[3];
  fs::create_directories(g_work);

  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_6();
    criterion_8();

    // cohort-A: generate once through the CLI, reuse for criteria 5 and 7
    Timer prep;
    const fs::path data_dir = g_work / "cohort_a";
    if (run_cli("synth --config \"" + g_config.string() + "\" --out \"" +
                data_dir.string() + "\"") != 0) {
      throw Error("cohort-A synth failed");
    }
    const Dataset cohort_a = cli::load_data_dir(data_dir.string());
    const CohortPredictions residual_preds = predict_cohort_residual(cohort_a);
    const CohortPredictions blr_preds = predict_cohort_blr_lopo(cohort_a);
    const double prep_seconds = prep.seconds();

    criterion_5(cohort_a, residual_preds, blr_preds);
    criterion_7(residual_preds, blr_preds, prep_seconds);
    criterion_9();
  } catch (const std::exception& e) {
    std::cerr << "acceptance harness error: " << e.what() << "\n";
    return 2;
  }

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) + " CRITERIA FAILED")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
