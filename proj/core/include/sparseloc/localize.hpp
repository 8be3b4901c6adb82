#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "sparseloc/ap_select.hpp"
#include "sparseloc/clustering.hpp"
#include "sparseloc/localize_types.hpp"
#include "sparseloc/radio_map.hpp"
#include "sparseloc/roi.hpp"
#include "sparseloc/solver.hpp"

namespace sparseloc {

/// Everything the online phase needs, derived once from a survey map.
struct TrainedModel {
  SurveyConfig config;
  std::vector<ReferencePoint> rps;
  AveragedRadioMap avg;
  ReliabilityProfile rel;
  StabilityProfile stab;
  std::vector<ClusterSet> clusters;

  static TrainedModel train(const RawRadioMap& raw);

  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);
};

struct LocalizeOptions {
  int num_aps = 10;
  double beta_relative = 0.2;          ///< beta = factor * max positive coefficient
  std::optional<double> beta_absolute; ///< overrides the relative rule when set
  double outlier_floor_db = 3.0;       ///< minimum |kappa| to flag an AP
  std::ostream* trace = nullptr;       ///< coarse-localization trace sink
};

/// Coefficient thresholding and weighted-centroid position. Indices whose
/// coefficient reaches beta contribute; an RP appearing at several
/// orientations contributes once per passing column.
PositionEstimate postprocess(const Eigen::VectorXd& theta, const std::vector<RoiColumn>& tags,
                             const std::vector<ReferencePoint>& rps, double beta);

/// Full online pipeline: reliability bits, ROI, Fisher AP selection,
/// sparse estimation on the standardized selected system, position
/// post-processing, and outlier flagging for the augmented methods.
PositionEstimate localize(const OnlineMeasurement& y, const TrainedModel& model, Method method,
                          const PenaltyProfile& pen, const SolverOptions& solver_options,
                          const LocalizeOptions& options);

/// Original AP indices whose estimated outlier magnitude reaches the floor.
std::vector<int> outlier_report(const SparseSolution& sol, const APSelection& sel,
                                double magnitude_floor);

}  // namespace sparseloc
