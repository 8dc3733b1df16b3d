#include "sigsched/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "sigsched/blr.hpp"
#include "sigsched/csv.hpp"
#include "sigsched/scheduler.hpp"
#include "sigsched/version.hpp"

namespace sigsched::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> provenance(const std::string& command,
                                    const nlohmann::json& config) {
  return {std::string("sigsched ") + kVersion, "command: " + command,
          "config: " + config.dump()};
}

void write_header(std::ofstream& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) out << "# " << line << "\n";
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path.string());
  return out;
}

std::map<std::string, double> load_per_participant_c(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open per-participant c file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid per-participant c JSON: " + std::string(e.what()));
  }
  std::map<std::string, double> overrides;
  for (const auto& [key, value] : doc.items()) {
    overrides[key] = value.get<double>();
  }
  return overrides;
}

void write_tradeoff_svg(const fs::path& path, const TradeoffCurve& sigma_curve,
                        const TradeoffCurve& fixed_curve, double threshold,
                        const std::vector<std::string>& header_lines) {
  constexpr double kW = 640.0, kH = 480.0;
  constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;
  constexpr double kMaxDelay = 6.0;

  auto sx = [&](double delay_h) {
    return kLeft + (kW - kLeft - kRight) * std::clamp(delay_h, 0.0, kMaxDelay) / kMaxDelay;
  };
  auto sy = [&](double proportion) {
    return kH - kBottom - (kH - kTop - kBottom) * std::clamp(proportion, 0.0, 1.0);
  };
  auto polyline = [&](const TradeoffCurve& curve) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : curve.points) {
      pts.emplace_back(p.mean_delay_hours, p.proportion_meeting);
    }
    std::stable_sort(pts.begin(), pts.end());
    std::string s;
    for (const auto& [d, pr] : pts) {
      s += csv::format_double(sx(d)) + "," + csv::format_double(sy(pr)) + " ";
    }
    return s;
  };

  std::ofstream out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!--\n";
  for (const auto& line : header_lines) out << "  " << line << "\n";
  out << "-->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kH - kBottom << "\" x2=\"" << kW - kRight
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kH - kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 6; ++i) {
    const double x = sx(i);
    out << "<line x1=\"" << x << "\" y1=\"" << kH - kBottom << "\" x2=\"" << x
        << "\" y2=\"" << kH - kBottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << kH - kBottom + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << i << "</text>\n";
  }
  for (int i = 0; i <= 10; i += 2) {
    const double y = sy(i / 10.0);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft
        << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 10 << "\" y=\"" << y + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << i * 10 << "%</text>\n";
  }
  out << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">mean delay (hours)</text>\n";
  out << "<text x=\"18\" y=\"" << (kTop + kH - kBottom) / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (kTop + kH - kBottom) / 2 << ")\">participants meeting coverage</text>\n";
  out << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"24\" font-size=\"14\" "
      << "text-anchor=\"middle\">desired coverage " << csv::format_double(threshold)
      << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\""
      << polyline(sigma_curve) << "\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"2\" points=\""
      << polyline(fixed_curve) << "\"/>\n";
  out << "<text x=\"" << kW - kRight - 10 << "\" y=\"" << kTop + 16
      << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#1f77b4\">sigma</text>\n";
  out << "<text x=\"" << kW - kRight - 10 << "\" y=\"" << kTop + 32
      << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#ff7f0e\">fixed</text>\n";
  out << "</svg>\n";
}

}  // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
  if (spec.empty()) throw ConfigError("empty grid specification");
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    const auto parts = csv::split(spec, ':');
    if (parts.size() != 3) {
      throw ConfigError("grid spec must be lo:hi:count, got: " + spec);
    }
    try {
      const double lo = std::stod(parts[0]);
      const double hi = std::stod(parts[1]);
      const int count = std::stoi(parts[2]);
      if (count < 1 || lo > hi) throw std::invalid_argument("range");
      return linspace(lo, hi, count);
    } catch (const std::exception&) {
      throw ConfigError("bad grid spec: " + spec);
    }
  }
  for (const auto& field : csv::split(spec, ',')) {
    try {
      grid.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ConfigError("bad grid value: '" + field + "'");
    }
  }
  return grid;
}

Dataset load_data_dir(const std::string& dir) {
  const fs::path base(dir);
  Weekday anchor = Weekday::Monday;
  const fs::path meta_path = base / "dataset-meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path);
    nlohmann::json doc;
    try {
      in >> doc;
      if (doc.contains("anchor")) {
        anchor = weekday_from_string(doc.at("anchor").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("invalid dataset-meta.json: " + std::string(e.what()));
    }
  }
  return load_dataset((base / "events.csv").string(),
                      (base / "schedules.csv").string(), anchor);
}

void run_synth(const SynthOptions& options) {
  SynthConfig config = synth_config_from_json_file(options.config_path);
  if (options.seed_override) config.seed = *options.seed_override;

  const Dataset dataset = synth_cohort(config);

  nlohmann::json echo = nlohmann::json::parse(synth_config_to_json(config));
  nlohmann::json run_config;
  run_config["synth"] = echo;
  run_config["out"] = options.out_dir;
  const auto header = provenance("synth", run_config);

  const fs::path out(options.out_dir);
  fs::create_directories(out);
  write_dataset(dataset, (out / "events.csv").string(),
                (out / "schedules.csv").string(), header);

  nlohmann::json meta;
  meta["anchor"] = to_string(config.anchor);
  meta["generator"] = "mt19937_64/box-muller";
  meta["config"] = echo;
  meta["tool"] = "sigsched";
  meta["version"] = kVersion;
  std::ofstream mf = open_out(out / "dataset-meta.json");
  mf << meta.dump(2) << "\n";
}

void run_elicit(const ElicitOptions& options) {
  const Dataset dataset = load_data_dir(options.data_dir);

  Dataset training;
  if (options.holdout.empty()) {
    training = dataset;
  } else {
    std::optional<std::size_t> index;
    for (std::size_t i = 0; i < dataset.participants.size(); ++i) {
      if (dataset.participants[i].schedule.participant == options.holdout) {
        index = i;
        break;
      }
    }
    if (!index) {
      throw InsufficientData("held-out participant not in dataset: " + options.holdout);
    }
    training = training_subset(dataset, *index);
  }

  const PriorSpec prior = elicit_priors(training);
  std::ofstream out = open_out(options.out_path);
  out << prior_spec_to_json(prior, {{"tool", "sigsched"},
                                    {"version", kVersion},
                                    {"data", options.data_dir},
                                    {"holdout", options.holdout}})
      << "\n";
}

void run_schedule(const ScheduleOptions& options) {
  if (options.method == Method::Sigma) {
    if (!options.c || options.fixed_min) {
      throw ConfigError("sigma method takes --c and not --fixed-min");
    }
    if (*options.c > 0.0) throw ConfigError("--c must be <= 0");
  } else {
    if (!options.fixed_min || options.c) {
      throw ConfigError("fixed method takes --fixed-min and not --c");
    }
    if (*options.fixed_min > 0.0) throw ConfigError("--fixed-min must be <= 0");
  }
  if (options.predictor == PredictorKind::Blr && options.priors_path.empty()) {
    throw InsufficientData("blr scheduling requires --priors");
  }

  const Dataset dataset = load_data_dir(options.data_dir);
  std::optional<PriorSpec> prior;
  if (!options.priors_path.empty()) {
    prior = prior_spec_from_json_file(options.priors_path);
  }
  std::map<std::string, double> c_overrides;
  if (!options.per_participant_c_path.empty()) {
    if (options.method != Method::Sigma) {
      throw ConfigError("per-participant c applies to the sigma method only");
    }
    c_overrides = load_per_participant_c(options.per_participant_c_path);
  }

  std::vector<ScheduleRow> rows = predict_all_slots(
      dataset, options.predictor, prior ? &*prior : nullptr);
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.participant != b.participant) return a.participant < b.participant;
    if (a.day_index != b.day_index) return a.day_index < b.day_index;
    return static_cast<int>(a.slot) < static_cast<int>(b.slot);
  });

  nlohmann::json run_config;
  run_config["data"] = options.data_dir;
  run_config["predictor"] = to_string(options.predictor);
  run_config["method"] = to_string(options.method);
  if (options.c) run_config["c"] = *options.c;
  if (options.fixed_min) run_config["fixed_min"] = *options.fixed_min;
  if (!options.priors_path.empty()) run_config["priors"] = options.priors_path;
  if (!options.per_participant_c_path.empty()) {
    run_config["c_per_participant"] = options.per_participant_c_path;
  }
  run_config["out"] = options.out_path;

  std::ofstream out = open_out(options.out_path);
  write_header(out, provenance("schedule", run_config));
  out << "participant_id,day_index,slot,scheduled_min,t_hat_min,sigma_min,clipped\n";
  for (const auto& row : rows) {
    DecisionPoint dp;
    if (options.method == Method::Sigma) {
      double c = *options.c;
      if (auto it = c_overrides.find(row.participant); it != c_overrides.end()) {
        c = it->second;
      }
      dp = schedule_sigma(row.prediction, SigmaPolicy{c}, row.slot);
    } else {
      dp = schedule_fixed(row.prediction.t_hat, FixedPolicy{*options.fixed_min},
                          row.slot);
    }
    out << row.participant << ',' << row.day_index << ',' << to_string(row.slot)
        << ',' << csv::format_double(dp.time.count()) << ','
        << csv::format_double(row.prediction.t_hat.count()) << ','
        << csv::format_double(row.prediction.sigma) << ',' << (dp.clipped ? 1 : 0)
        << '\n';
  }
}

void run_sweep(const SweepOptions& options) {
  const Dataset dataset = load_data_dir(options.data_dir);

  const std::vector<double> thresholds =
      options.thresholds.empty() ? default_thresholds() : options.thresholds;
  const std::vector<double> grid_c =
      options.grid_c.empty() ? default_sigma_grid() : options.grid_c;
  const std::vector<double> grid_f =
      options.grid_f.empty() ? default_fixed_grid() : options.grid_f;
  for (double t : thresholds) {
    if (t < 0.0 || t > 1.0) throw ConfigError("thresholds must lie in [0, 1]");
  }

  CohortPredictions predictions;
  if (options.predictor == PredictorKind::Residual) {
    predictions = predict_cohort_residual(dataset);
  } else if (!options.priors_path.empty()) {
    predictions = predict_cohort_blr(dataset, prior_spec_from_json_file(options.priors_path));
  } else {
    predictions = predict_cohort_blr_lopo(dataset);
  }

  nlohmann::json run_config;
  run_config["data"] = options.data_dir;
  run_config["predictor"] = to_string(options.predictor);
  run_config["thresholds"] = thresholds;
  run_config["grid_c"] = grid_c;
  run_config["grid_f"] = grid_f;
  run_config["out"] = options.out_dir;
  run_config["svg"] = options.svg;
  if (!options.priors_path.empty()) run_config["priors"] = options.priors_path;
  const auto header = provenance("sweep", run_config);

  const fs::path out(options.out_dir);
  fs::create_directories(out);
  std::ofstream curves = open_out(out / "curves.csv");
  write_header(curves, header);
  curves << "method,threshold,parameter,mean_delay_hours,proportion_meeting\n";
  std::ofstream aucs = open_out(out / "auc.csv");
  write_header(aucs, header);
  aucs << "predictor,method,threshold,auc_pp_hours\n";

  for (double threshold : thresholds) {
    const TradeoffCurve sigma_curve =
        sweep_curve(predictions, Method::Sigma, grid_c, threshold);
    const TradeoffCurve fixed_curve =
        sweep_curve(predictions, Method::Fixed, grid_f, threshold);
    for (const TradeoffCurve* curve : {&sigma_curve, &fixed_curve}) {
      for (const auto& p : curve->points) {
        curves << to_string(curve->method) << ',' << csv::format_double(threshold)
               << ',' << csv::format_double(p.parameter) << ','
               << csv::format_double(p.mean_delay_hours) << ','
               << csv::format_double(p.proportion_meeting) << '\n';
      }
      aucs << to_string(options.predictor) << ',' << to_string(curve->method) << ','
           << csv::format_double(threshold) << ','
           << csv::format_double(auc(*curve)) << '\n';
    }
    if (options.svg) {
      write_tradeoff_svg(out / ("tradeoff_" + csv::format_double(threshold) + ".svg"),
                         sigma_curve, fixed_curve, threshold, header);
    }
  }
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const NumericalFailure*>(&error)) return 4;
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const Error*>(&error)) return 3;
  return 1;
}

}  // namespace sigsched::cli
