#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sparseloc/clustering.hpp"
#include "sparseloc/radio_map.hpp"

namespace sparseloc {

/// Tag mapping a fingerprint column back to its reference point and
/// orientation; retained through post-processing so repeated RPs can pool
/// their coefficients.
struct RoiColumn {
  int rp = 0;
  int orientation = 0;
};

/// Fingerprint columns restricted to the region of interest. A column exists
/// for (rp, orientation) exactly when that RP was selected at that
/// orientation; values are copied unchanged from the averaged map.
struct ModifiedRadioMap {
  Eigen::MatrixXd psi; ///< L x V
  std::vector<RoiColumn> columns;
  std::vector<int> roi_rps; ///< sorted unique RP indices

  // Coarse-localization trace, per orientation.
  std::vector<int> winner_cluster;
  std::vector<int> winner_distance;
  std::vector<std::vector<int>> included_clusters;

  int column_count() const { return static_cast<int>(columns.size()); }
};

/// Coarse localization: per orientation, picks the cluster whose head's
/// reliability vector is Hamming-closest to the online bits (ties to the
/// lowest cluster index) and includes that cluster plus every cluster sharing
/// at least one RP with it. Columns concatenate orientation-major.
ModifiedRadioMap select_roi(const Eigen::VectorXi& online_bits,
                            const std::vector<ClusterSet>& clusters,
                            const ReliabilityProfile& rel, const AveragedRadioMap& avg);

}  // namespace sparseloc
