// Command-line front end: simulate / train / cluster / localize / evaluate / cv.
// Progress goes to stderr; machine artifacts go to files or stdout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparseloc/baselines.hpp"
#include "sparseloc/evaluate.hpp"
#include "sparseloc/localize.hpp"
#include "sparseloc/simulate.hpp"

using namespace sparseloc;
using nlohmann::json;

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) values.push_back(std::stod(cell));
  }
  if (values.empty()) throw CLI::ValidationError("empty value list: " + text);
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (double v : parse_grid(text)) values.push_back(static_cast<int>(v));
  return values;
}

std::vector<std::string> split_methods(const std::string& text) {
  std::vector<std::string> methods;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) methods.push_back(cell);
  }
  return methods;
}

json estimate_to_json(const PositionEstimate& est, const TrainedModel& model) {
  json support = json::array();
  for (const auto& s : est.support) {
    support.push_back(json{{"rp", s.rp + 1},
                           {"orientation", s.orientation >= 0
                                               ? model.config.orientations_deg[s.orientation]
                                               : -1.0},
                           {"coefficient", s.coefficient}});
  }
  json outliers = json::array();
  for (int i : est.outlier_aps) outliers.push_back(i + 1);
  return json{{"x", est.x},
              {"y", est.y},
              {"method", est.method},
              {"support", std::move(support)},
              {"outlier_aps", std::move(outliers)},
              {"diagnostics", json{{"objective", est.objective},
                                   {"iterations", est.iterations},
                                   {"converged", est.converged},
                                   {"kkt_residual", est.kkt_residual},
                                   {"roi_size", est.roi_size},
                                   {"low_confidence", est.low_confidence}}}};
}

struct CommonModelFlags {
  std::optional<double> gamma;
  std::optional<double> eta_fraction;

  void apply(RawRadioMap& raw) const {
    if (gamma) raw.config.reliability_threshold = *gamma;
    if (eta_fraction) raw.config.eta_fraction = *eta_fraction;
  }
};

struct SimulateArgs {
  std::string out;
  std::uint64_t seed = 0;
  EnvironmentSpec env;
  int ap_count = 20;
  bool ap_count_given = false;
  bool area_given = false;
  int fixes = 0;
  std::string fixes_out;
  std::string truth_out;
  std::vector<int> outlier_aps;
  std::string outlier_mode = "bias";
  double outlier_bias = 30.0;
};

int run_simulate(SimulateArgs& args) {
  args.env.seed = args.seed;
  if (args.ap_count_given || args.area_given) {
    args.env.ap_positions = EnvironmentSpec::default_ap_layout(
        args.env.area_width, args.env.area_height, args.ap_count);
  }
  const RawRadioMap raw = generate_survey(args.env);
  const std::string env_json = args.env.to_json();
  save_radio_map(raw, args.out, &env_json);
  std::cerr << "wrote " << args.out << " (" << raw.config.num_rps << " rps, "
            << raw.config.num_aps << " aps, " << raw.config.samples_per_rp << " samples, "
            << raw.config.num_orientations() << " orientations)\n";

  if (args.fixes > 0) {
    if (args.fixes_out.empty())
      throw CLI::ValidationError("--fixes requires --fixes-out");
    EvaluationSetup setup;
    setup.num_fixes = args.fixes;
    setup.seed = args.seed;
    setup.outlier_bias = args.outlier_bias;
    setup.outlier_mode = args.outlier_mode == "dropout" ? OutlierSpec::Mode::kDropout
                                                        : OutlierSpec::Mode::kBias;
    for (int i : args.outlier_aps) setup.outlier_ap_override.push_back(i - 1);
    const std::vector<TestFix> fixes = make_test_fixes(args.env, raw.rps, setup);

    std::vector<Eigen::VectorXd> rows;
    for (const TestFix& fix : fixes) rows.push_back(fix.measurement.rss);
    save_measurements_csv(rows, args.fixes_out, raw.config.missing_sentinel);
    std::cerr << "wrote " << args.fixes_out << " (" << fixes.size() << " fixes)\n";

    if (!args.truth_out.empty()) {
      std::ofstream truth(args.truth_out);
      if (!truth) throw DataError("cannot open for writing: " + args.truth_out);
      truth << "x,y,orientation,outlier_aps\n";
      char buf[64];
      for (const TestFix& fix : fixes) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%g", fix.truth.x, fix.truth.y,
                      args.env.orientation_bias.size() > 1
                          ? 90.0 * fix.truth.orientation
                          : 0.0);
        truth << buf;
        truth << ',';
        for (std::size_t i = 0; i < fix.truth.outlier_aps.size(); ++i) {
          if (i > 0) truth << ';';
          truth << fix.truth.outlier_aps[i] + 1;
        }
        truth << '\n';
      }
      std::cerr << "wrote " << args.truth_out << '\n';
    }
  }
  return 0;
}

struct TrainArgs {
  std::string map;
  std::string out;
  CommonModelFlags overrides;
};

int run_train(const TrainArgs& args) {
  RawRadioMap raw = load_radio_map(args.map);
  args.overrides.apply(raw);
  const TrainedModel model = TrainedModel::train(raw);
  model.save(args.out);
  int clusters = 0;
  for (const auto& set : model.clusters) clusters += set.cluster_count();
  std::cerr << "wrote " << args.out << " (" << clusters << " clusters over "
            << model.config.num_orientations() << " orientations)\n";
  return 0;
}

struct ClusterArgs {
  std::string map;
  std::string out;
  bool dump = false;
  CommonModelFlags overrides;
};

int run_cluster(const ClusterArgs& args) {
  RawRadioMap raw = load_radio_map(args.map);
  args.overrides.apply(raw);
  const TrainedModel model = TrainedModel::train(raw);
  const std::string text = cluster_sets_to_json(model.clusters, model.config);
  if (args.out.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(args.out);
    if (!out) throw DataError("cannot open for writing: " + args.out);
    out << text << '\n';
    std::cerr << "wrote " << args.out << '\n';
  }
  return 0;
}

struct LocalizeArgs {
  std::string model;
  std::string measurements;
  std::string method = "lasso";
  std::string out;
  int num_aps = 10;
  PenaltyProfile pen;
  std::optional<double> beta;
  double outlier_floor = 3.0;
  bool trace = false;
};

int run_localize(const LocalizeArgs& args) {
  const TrainedModel model = TrainedModel::load(args.model);
  const auto rows = load_measurements_csv(args.measurements, model.config.num_aps,
                                          model.config.missing_sentinel);
  const Method method = parse_method(args.method);
  LocalizeOptions options;
  options.num_aps = args.num_aps;
  options.beta_absolute = args.beta;
  options.outlier_floor_db = args.outlier_floor;
  if (args.trace) options.trace = &std::cerr;

  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw DataError("cannot open for writing: " + args.out);
  }
  std::ostream& sink = args.out.empty() ? std::cout : file;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const OnlineMeasurement y =
        OnlineMeasurement::from_rss(rows[r], model.config.reliability_threshold);
    const PositionEstimate est =
        localize(y, model, method, args.pen, SolverOptions{}, options);
    sink << estimate_to_json(est, model).dump() << '\n';
  }
  std::cerr << "localized " << rows.size() << " fixes with " << args.method << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string map;
  std::string out;
  std::string cdf_out;
  std::string methods = "lasso,glmnet,cs,wknn";
  int num_aps = 10;
  int num_fixes = 100;
  std::uint64_t seed = 0;
  PenaltyProfile pen;
  std::optional<double> beta;
  int outlier_count = 0;
  double outlier_bias = 30.0;
  int knn_k = 10;
  double kde_sigma = 5.0;
  bool no_timing = false;
};

int run_evaluate(const EvaluateArgs& args) {
  const auto env_text = load_radio_map_environment(args.map);
  if (!env_text)
    throw DataError(args.map + ": no embedded environment; regenerate with `simulate`");
  const EnvironmentSpec env = EnvironmentSpec::from_json(*env_text);
  const RawRadioMap raw = load_radio_map(args.map);
  const TrainedModel model = TrainedModel::train(raw);

  EvaluationSetup setup;
  setup.methods = split_methods(args.methods);
  setup.num_fixes = args.num_fixes;
  setup.seed = args.seed;
  setup.outliers_per_fix = args.outlier_count;
  setup.outlier_bias = args.outlier_bias;
  setup.penalties = args.pen;
  setup.localize.num_aps = args.num_aps;
  setup.localize.beta_absolute = args.beta;
  setup.baselines.k = args.knn_k;
  setup.baselines.kernel_sigma = args.kde_sigma;

  const auto fixes = make_test_fixes(env, model, setup);
  const EvalReport report = run_evaluation(model, fixes, setup);
  write_report_csv(report, args.out, !args.no_timing);
  std::cerr << "wrote " << args.out << '\n';
  if (!args.cdf_out.empty()) {
    write_cdf_csv(report, args.cdf_out);
    std::cerr << "wrote " << args.cdf_out << '\n';
  }
  for (const EvalRow& row : report.rows) {
    std::fprintf(stderr, "%-10s mae %7.3f ft  p50 %7.3f ft  %.3f ms/fix\n", row.method.c_str(),
                 row.mae, row.p50, row.time_ms);
  }
  return 0;
}

struct CvArgs {
  std::string map;
  std::string out;
  std::string method = "lasso";
  std::string lambda_grid = "0.001,0.01,0.1,1";
  std::string alpha_grid;
  std::string mu_grid;
  int folds = 2;
  int num_fixes = 50;
  int num_aps = 10;
  std::uint64_t seed = 0;
  std::string objective = "residual";
};

int run_cv(const CvArgs& args) {
  const auto env_text = load_radio_map_environment(args.map);
  if (!env_text)
    throw DataError(args.map + ": no embedded environment; regenerate with `simulate`");
  const EnvironmentSpec env = EnvironmentSpec::from_json(*env_text);
  const TrainedModel model = TrainedModel::train(load_radio_map(args.map));

  EvaluationSetup setup;
  setup.num_fixes = args.num_fixes;
  setup.seed = args.seed;
  setup.localize.num_aps = args.num_aps;

  std::vector<CvTuple> grid;
  const std::vector<double> lambdas = parse_grid(args.lambda_grid);
  const std::vector<double> alphas =
      args.alpha_grid.empty() ? std::vector<double>{setup.penalties.alpha}
                              : parse_grid(args.alpha_grid);
  const std::vector<double> mus = args.mu_grid.empty()
                                      ? std::vector<double>{setup.penalties.mu}
                                      : parse_grid(args.mu_grid);
  for (double l : lambdas)
    for (double a : alphas)
      for (double m : mus) grid.push_back(CvTuple{l, a, m});

  const auto fixes = make_test_fixes(env, model, setup);
  const CVResult result = cross_validate(
      fixes, model, parse_method(args.method), grid, args.folds, setup,
      args.objective == "position" ? CvObjective::kPositionError : CvObjective::kResidual);
  write_cv_csv(result, args.out);
  const CvTuple& best = result.grid[static_cast<std::size_t>(result.best_index)];
  std::cerr << "wrote " << args.out << "; best lambda " << best.lambda << " alpha "
            << best.alpha << " mu " << best.mu << '\n';
  return 0;
}

void add_penalty_flags(CLI::App* cmd, PenaltyProfile& pen) {
  cmd->add_option("--lambda", pen.lambda, "L1 penalty weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--alpha", pen.alpha, "elastic-net mixing in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--mu", pen.mu, "outlier-block L1 weight")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparseloc: sparse-recovery WLAN fingerprint localization toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic survey radio map");
  simulate->add_option("--out", sim.out, "radio-map JSON path")->required();
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--width", sim.env.area_width, "site width in feet")
      ->each([&](const std::string&) { sim.area_given = true; });
  simulate->add_option("--height", sim.env.area_height, "site height in feet")
      ->each([&](const std::string&) { sim.area_given = true; });
  simulate->add_option("--spacing", sim.env.grid_spacing, "grid spacing in feet");
  simulate->add_option("--grid-cols", sim.env.grid_cols, "grid columns");
  simulate->add_option("--grid-rows", sim.env.grid_rows, "grid rows");
  simulate->add_option("--aps", sim.ap_count, "AP count for the default lattice")
      ->each([&](const std::string&) { sim.ap_count_given = true; });
  simulate->add_option("--samples", sim.env.samples_per_rp, "samples per RP");
  simulate->add_option("--shadowing-sigma", sim.env.shadowing_sigma, "shadowing sigma in dB");
  simulate->add_option("--temporal-sigma", sim.env.temporal_sigma, "temporal sigma in dB");
  simulate->add_option("--detection-floor", sim.env.detection_floor, "detection floor in dBm");
  simulate->add_option("--gamma", sim.env.reliability_threshold,
                       "reliability threshold in dBm");
  simulate->add_option("--eta-fraction", sim.env.eta_fraction,
                       "cluster agreement fraction of L");
  simulate->add_option("--fixes", sim.fixes, "also draw this many online fixes");
  simulate->add_option("--fixes-out", sim.fixes_out, "measurement CSV path");
  simulate->add_option("--truth-out", sim.truth_out, "fix ground-truth CSV path");
  simulate->add_option("--outlier-aps", sim.outlier_aps,
                       "1-based AP indices to corrupt in every fix")
      ->delimiter(',');
  simulate->add_option("--outlier-mode", sim.outlier_mode, "bias or dropout")
      ->check(CLI::IsMember({"bias", "dropout"}));
  simulate->add_option("--outlier-bias", sim.outlier_bias, "bias magnitude in dB");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "build a model archive from a radio map");
  train_cmd->add_option("--map", train.map, "radio-map JSON")->required();
  train_cmd->add_option("--out", train.out, "model JSON path")->required();
  train_cmd->add_option("--gamma", train.overrides.gamma, "reliability threshold override");
  train_cmd->add_option("--eta-fraction", train.overrides.eta_fraction,
                        "cluster agreement fraction override");

  ClusterArgs cluster;
  CLI::App* cluster_cmd = app.add_subcommand("cluster", "inspect the offline clustering");
  cluster_cmd->add_option("--map", cluster.map, "radio-map JSON")->required();
  cluster_cmd->add_flag("--dump", cluster.dump, "dump cluster sets as JSON")->required();
  cluster_cmd->add_option("--out", cluster.out, "output path (stdout when omitted)");
  cluster_cmd->add_option("--gamma", cluster.overrides.gamma, "reliability threshold override");
  cluster_cmd->add_option("--eta-fraction", cluster.overrides.eta_fraction,
                          "cluster agreement fraction override");

  LocalizeArgs loc;
  CLI::App* localize_cmd = app.add_subcommand("localize", "estimate positions for fixes");
  localize_cmd->add_option("--model", loc.model, "model JSON from `train`")->required();
  localize_cmd->add_option("--measurements", loc.measurements, "measurement CSV")->required();
  localize_cmd->add_option("--method", loc.method,
                           "cs, lasso, glmnet, m-cs, m-lasso, or m-glmnet");
  localize_cmd->add_option("--num-aps", loc.num_aps, "APs to select")->check(CLI::PositiveNumber);
  add_penalty_flags(localize_cmd, loc.pen);
  localize_cmd->add_option("--beta", loc.beta, "absolute coefficient threshold");
  localize_cmd->add_option("--outlier-floor", loc.outlier_floor,
                           "minimum |kappa| in dB to flag an AP");
  localize_cmd->add_option("--out", loc.out, "fix JSONL path (stdout when omitted)");
  localize_cmd->add_flag("--trace", loc.trace, "print coarse-localization trace to stderr");

  EvaluateArgs eval;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "compare methods on synthetic fixes");
  evaluate_cmd->add_option("--map", eval.map, "radio-map JSON with embedded environment")
      ->required();
  evaluate_cmd->add_option("--out", eval.out, "report CSV path")->required();
  evaluate_cmd->add_option("--cdf-out", eval.cdf_out, "error CDF CSV path");
  evaluate_cmd->add_option("--methods", eval.methods, "comma-separated method list");
  evaluate_cmd->add_option("--num-aps", eval.num_aps, "APs to select")
      ->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--num-fixes", eval.num_fixes, "test fixes to draw")
      ->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--seed", eval.seed, "fix-set seed");
  add_penalty_flags(evaluate_cmd, eval.pen);
  evaluate_cmd->add_option("--beta", eval.beta, "absolute coefficient threshold");
  evaluate_cmd->add_option("--outlier-count", eval.outlier_count,
                           "APs biased per fix (strongest readings)");
  evaluate_cmd->add_option("--outlier-bias", eval.outlier_bias, "bias magnitude in dB");
  evaluate_cmd->add_option("--knn-k", eval.knn_k, "wknn neighbor count");
  evaluate_cmd->add_option("--kde-sigma", eval.kde_sigma, "kde kernel width in dBm");
  evaluate_cmd->add_flag("--no-timing", eval.no_timing,
                         "write zeros in the time_ms column for byte-stable reports");

  CvArgs cv;
  CLI::App* cv_cmd = app.add_subcommand("cv", "cross-validate penalty parameters");
  cv_cmd->add_option("--map", cv.map, "radio-map JSON with embedded environment")->required();
  cv_cmd->add_option("--out", cv.out, "CV result CSV path")->required();
  cv_cmd->add_option("--method", cv.method, "method to tune");
  cv_cmd->add_option("--lambda-grid", cv.lambda_grid, "comma-separated lambda values");
  cv_cmd->add_option("--alpha-grid", cv.alpha_grid, "comma-separated alpha values");
  cv_cmd->add_option("--mu-grid", cv.mu_grid, "comma-separated mu values");
  cv_cmd->add_option("--folds", cv.folds, "fold count")->check(CLI::Range(2, 1000));
  cv_cmd->add_option("--num-fixes", cv.num_fixes, "fixes to draw")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--num-aps", cv.num_aps, "APs to select")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--seed", cv.seed, "fix-set seed");
  cv_cmd->add_option("--objective", cv.objective, "residual or position")
      ->check(CLI::IsMember({"residual", "position"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (train_cmd->parsed()) return run_train(train);
    if (cluster_cmd->parsed()) return run_cluster(cluster);
    if (localize_cmd->parsed()) return run_localize(loc);
    if (evaluate_cmd->parsed()) return run_evaluate(eval);
    if (cv_cmd->parsed()) return run_cv(cv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
