#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sparseloc/radio_map.hpp"

namespace sparseloc {

/// Online AP selection by Fisher score, averaged over orientations.
struct APSelection {
  std::vector<Eigen::VectorXd> per_orientation_scores;
  Eigen::VectorXd averaged_scores;
  std::vector<int> selected; ///< AP indices, best score first; ties to lowest index
  int num_aps = 0;

  /// 0/1 matrix with one unit row per selected AP, in selection order.
  Eigen::MatrixXd selection_matrix() const;
};

/// Fisher score per AP over the ROI at one orientation: between-RP spread of
/// the averaged fingerprints divided by the pooled within-RP sample variance.
/// The denominator is floored at 1e-9 so noiseless data yields finite scores.
Eigen::VectorXd fisher_scores(const RawRadioMap& raw, const AveragedRadioMap& avg,
                              const std::vector<int>& roi_rps, int orientation);

/// Same score computed from the stored per-AP variances; equals the raw-sample
/// route exactly because the pooled variance is the sum of per-RP variances.
Eigen::VectorXd fisher_scores(const StabilityProfile& stab, const AveragedRadioMap& avg,
                              const std::vector<int>& roi_rps, int orientation);

APSelection select_aps(const std::vector<Eigen::VectorXd>& per_orientation_scores,
                       int count);

Eigen::VectorXd apply_selection(const APSelection& sel, const Eigen::VectorXd& v);
Eigen::MatrixXd apply_selection(const APSelection& sel, const Eigen::MatrixXd& m);

}  // namespace sparseloc
