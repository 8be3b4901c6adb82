#include "sparseloc/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "sparseloc/baselines.hpp"
#include "sparseloc/rng.hpp"

namespace sparseloc {

namespace {

constexpr std::uint64_t kFixPositionTag = 101;
constexpr std::uint64_t kFixSeedTag = 102;

double error_of(const PositionEstimate& est, const OnlineTruth& truth) {
  return std::hypot(est.x - truth.x, est.y - truth.y);
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double mae(const std::vector<std::pair<double, double>>& estimates,
           const std::vector<std::pair<double, double>>& truths) {
  if (estimates.size() != truths.size() || estimates.empty())
    throw std::invalid_argument("mae: estimate and truth lists must match and be non-empty");
  double sum = 0.0;
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    sum += std::hypot(estimates[t].first - truths[t].first,
                      estimates[t].second - truths[t].second);
  }
  return sum / static_cast<double>(estimates.size());
}

double percentile_nearest_rank(const std::vector<double>& sorted_errors, double q) {
  if (sorted_errors.empty())
    throw std::invalid_argument("percentile_nearest_rank: empty error list");
  const auto n = static_cast<double>(sorted_errors.size());
  const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n));
  const std::size_t index = std::min(std::max<std::size_t>(rank, 1), sorted_errors.size()) - 1;
  return sorted_errors[index];
}

std::vector<TestFix> make_test_fixes(const EnvironmentSpec& env, const TrainedModel& model,
                                     const EvaluationSetup& setup) {
  return make_test_fixes(env, model.rps, setup);
}

std::vector<TestFix> make_test_fixes(const EnvironmentSpec& env,
                                     const std::vector<ReferencePoint>& rps,
                                     const EvaluationSetup& setup) {
  double min_x = rps.front().x, max_x = min_x;
  double min_y = rps.front().y, max_y = min_y;
  for (const auto& rp : rps) {
    min_x = std::min(min_x, rp.x);
    max_x = std::max(max_x, rp.x);
    min_y = std::min(min_y, rp.y);
    max_y = std::max(max_y, rp.y);
  }

  std::vector<TestFix> fixes;
  fixes.reserve(static_cast<std::size_t>(setup.num_fixes));
  for (int t = 0; t < setup.num_fixes; ++t) {
    rng::Stream pos(setup.seed, {kFixPositionTag, static_cast<std::uint64_t>(t)});
    const double x = min_x + pos.uniform() * (max_x - min_x);
    const double y = min_y + pos.uniform() * (max_y - min_y);
    rng::Stream seeder(setup.seed, {kFixSeedTag, static_cast<std::uint64_t>(t)});
    const std::uint64_t fix_seed = seeder.next_u64();

    OutlierSpec outliers;
    outliers.bias_magnitude = setup.outlier_bias;
    outliers.mode = setup.outlier_mode;
    if (!setup.outlier_ap_override.empty()) {
      outliers.ap_indices = setup.outlier_ap_override;
    } else if (setup.outliers_per_fix > 0) {
      // Corrupt the strongest clean readings; those APs are the likeliest to
      // be selected, so the injection actually lands in the solved system.
      auto [clean, clean_truth] = generate_online(env, x, y, OutlierSpec{}, fix_seed);
      std::vector<int> order(clean.rss.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return clean.rss(a) > clean.rss(b); });
      outliers.ap_indices.assign(order.begin(), order.begin() + setup.outliers_per_fix);
      std::sort(outliers.ap_indices.begin(), outliers.ap_indices.end());
    }
    auto [measurement, truth] = generate_online(env, x, y, outliers, fix_seed);
    fixes.push_back(TestFix{std::move(measurement), std::move(truth)});
  }
  return fixes;
}

EvalReport run_evaluation(const TrainedModel& model, const std::vector<TestFix>& fixes,
                          const EvaluationSetup& setup) {
  if (fixes.empty()) throw std::invalid_argument("run_evaluation: no fixes");
  EvalReport report;
  for (const std::string& name : setup.methods) {
    EvalRow row;
    row.method = name;
    std::vector<std::pair<double, double>> estimates, truths;
    double total_ms = 0.0;
    for (const TestFix& fix : fixes) {
      const auto start = std::chrono::steady_clock::now();
      PositionEstimate est;
      if (name == "wknn") {
        est = wknn(fix.measurement, model.avg, model.rps, setup.baselines);
      } else if (name == "kde") {
        est = kde(fix.measurement, model.avg, model.rps, setup.baselines);
      } else {
        est = localize(fix.measurement, model, parse_method(name), setup.penalties,
                       setup.solver, setup.localize);
      }
      const auto stop = std::chrono::steady_clock::now();
      total_ms += std::chrono::duration<double, std::milli>(stop - start).count();
      estimates.emplace_back(est.x, est.y);
      truths.emplace_back(fix.truth.x, fix.truth.y);
      row.errors_sorted.push_back(error_of(est, fix.truth));
    }
    std::sort(row.errors_sorted.begin(), row.errors_sorted.end());
    row.mae = mae(estimates, truths);
    row.p25 = percentile_nearest_rank(row.errors_sorted, 25.0);
    row.p50 = percentile_nearest_rank(row.errors_sorted, 50.0);
    row.p75 = percentile_nearest_rank(row.errors_sorted, 75.0);
    row.p100 = percentile_nearest_rank(row.errors_sorted, 100.0);
    row.time_ms = total_ms / static_cast<double>(fixes.size());
    report.rows.push_back(std::move(row));
  }
  return report;
}

CVResult cross_validate(const std::vector<TestFix>& fixes, const TrainedModel& model,
                        Method method, const std::vector<CvTuple>& grid, int folds,
                        const EvaluationSetup& setup, CvObjective objective) {
  if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (static_cast<int>(fixes.size()) < folds)
    throw std::invalid_argument("cross_validate: fewer fixes than folds");

  CVResult result;
  result.grid = grid;
  result.mse_curve.assign(grid.size(), 0.0);
  // Fix t is held out in fold t % folds; over all folds every fix is scored
  // exactly once per tuple.
  for (int fold = 0; fold < folds; ++fold) {
    for (std::size_t t = fold; t < fixes.size(); t += static_cast<std::size_t>(folds)) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        PenaltyProfile pen = setup.penalties;
        pen.lambda = grid[g].lambda;
        pen.alpha = grid[g].alpha;
        pen.mu = grid[g].mu;
        const PositionEstimate est =
            localize(fixes[t].measurement, model, method, pen, setup.solver, setup.localize);
        if (objective == CvObjective::kResidual) {
          result.mse_curve[g] +=
              est.residual_norm2 / static_cast<double>(setup.localize.num_aps);
        } else {
          const double err = error_of(est, fixes[t].truth);
          result.mse_curve[g] += err * err;
        }
      }
    }
  }
  for (double& v : result.mse_curve) v /= static_cast<double>(fixes.size());
  result.best_index = static_cast<int>(
      std::min_element(result.mse_curve.begin(), result.mse_curve.end()) -
      result.mse_curve.begin());
  return result;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path,
                      bool include_timing) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "method,mae,p25,p50,p75,p100,time_ms\n";
  for (const EvalRow& row : report.rows) {
    out << row.method << ',' << format_number(row.mae) << ',' << format_number(row.p25) << ','
        << format_number(row.p50) << ',' << format_number(row.p75) << ','
        << format_number(row.p100) << ',' << format_number(include_timing ? row.time_ms : 0.0)
        << '\n';
  }
}

void write_cdf_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "method,error,fraction\n";
  for (const EvalRow& row : report.rows) {
    const auto n = static_cast<double>(row.errors_sorted.size());
    for (std::size_t i = 0; i < row.errors_sorted.size(); ++i) {
      out << row.method << ',' << format_number(row.errors_sorted[i]) << ','
          << format_number(static_cast<double>(i + 1) / n) << '\n';
    }
  }
}

void write_cv_csv(const CVResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "lambda,alpha,mu,mse,best\n";
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    out << format_number(result.grid[g].lambda) << ',' << format_number(result.grid[g].alpha)
        << ',' << format_number(result.grid[g].mu) << ',' << format_number(result.mse_curve[g])
        << ',' << (static_cast<int>(g) == result.best_index ? 1 : 0) << '\n';
  }
}

}  // namespace sparseloc
