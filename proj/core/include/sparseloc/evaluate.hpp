#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparseloc/baselines.hpp"
#include "sparseloc/localize.hpp"
#include "sparseloc/simulate.hpp"

namespace sparseloc {

double mae(const std::vector<std::pair<double, double>>& estimates,
           const std::vector<std::pair<double, double>>& truths);

/// Nearest-rank percentile of a sorted error list: the value at 1-based index
/// ceil(q/100 * n). q = 100 returns the maximum.
double percentile_nearest_rank(const std::vector<double>& sorted_errors, double q);

struct EvalRow {
  std::string method;
  double mae = 0.0;
  double p25 = 0.0, p50 = 0.0, p75 = 0.0, p100 = 0.0;
  double time_ms = 0.0;
  std::vector<double> errors_sorted;
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

struct EvaluationSetup {
  std::vector<std::string> methods;
  int num_fixes = 100;
  std::uint64_t seed = 0;
  int outliers_per_fix = 0; ///< APs corrupted per fix, drawn from the strongest readings
  std::vector<int> outlier_ap_override; ///< explicit 0-based injection list instead
  OutlierSpec::Mode outlier_mode = OutlierSpec::Mode::kBias;
  double outlier_bias = 30.0;
  PenaltyProfile penalties;
  SolverOptions solver;
  LocalizeOptions localize;
  BaselineConfig baselines;
};

/// One synthetic test fix.
struct TestFix {
  OnlineMeasurement measurement;
  OnlineTruth truth;
};

/// Draws fix positions uniformly inside the RP bounding box; fix t uses the
/// derived seed (setup.seed, t), so the whole set is reproducible.
std::vector<TestFix> make_test_fixes(const EnvironmentSpec& env,
                                     const std::vector<ReferencePoint>& rps,
                                     const EvaluationSetup& setup);
std::vector<TestFix> make_test_fixes(const EnvironmentSpec& env, const TrainedModel& model,
                                     const EvaluationSetup& setup);

/// Runs every requested method over the fix set and aggregates error
/// statistics plus mean wall-clock per fix.
EvalReport run_evaluation(const TrainedModel& model, const std::vector<TestFix>& fixes,
                          const EvaluationSetup& setup);

struct CvTuple {
  double lambda = 0.1;
  double alpha = 0.95;
  double mu = 0.5;
};

enum class CvObjective { kResidual, kPositionError };

struct CVResult {
  std::vector<CvTuple> grid;
  std::vector<double> mse_curve;
  int best_index = 0;
};

/// k-fold tuning sweep: each fix is held out in exactly one fold and scored
/// with every tuple; the curve is the per-tuple mean of the held-out scores
/// (mean squared solver residual, or squared position error). Ties resolve
/// to the first tuple.
CVResult cross_validate(const std::vector<TestFix>& fixes, const TrainedModel& model,
                        Method method, const std::vector<CvTuple>& grid, int folds,
                        const EvaluationSetup& setup,
                        CvObjective objective = CvObjective::kResidual);

/// CSV emitters. Numbers use fixed 6-digit formatting so identical inputs
/// produce identical bytes. `include_timing` substitutes zero for the
/// wall-clock column when false.
void write_report_csv(const EvalReport& report, const std::filesystem::path& path,
                      bool include_timing = true);
void write_cdf_csv(const EvalReport& report, const std::filesystem::path& path);
void write_cv_csv(const CVResult& result, const std::filesystem::path& path);

}  // namespace sparseloc
