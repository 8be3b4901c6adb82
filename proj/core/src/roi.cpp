#include "sparseloc/roi.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sparseloc {

ModifiedRadioMap select_roi(const Eigen::VectorXi& online_bits,
                            const std::vector<ClusterSet>& clusters,
                            const ReliabilityProfile& rel, const AveragedRadioMap& avg) {
  const int num_o = static_cast<int>(clusters.size());
  ModifiedRadioMap roi;
  roi.winner_cluster.resize(num_o);
  roi.winner_distance.resize(num_o);
  roi.included_clusters.resize(num_o);

  std::vector<std::pair<int, int>> tagged; // (orientation, rp)
  std::set<int> rp_union;
  for (int o = 0; o < num_o; ++o) {
    const ClusterSet& set = clusters[o];
    if (set.clusters.empty()) throw std::invalid_argument("select_roi: empty cluster set");

    int best = 0;
    int best_dist = hamming_distance(online_bits, rel.indicator_vector(o, set.clusters[0].head));
    for (int k = 1; k < set.cluster_count(); ++k) {
      const int d =
          hamming_distance(online_bits, rel.indicator_vector(o, set.clusters[k].head));
      if (d < best_dist) {
        best = k;
        best_dist = d;
      }
    }
    roi.winner_cluster[o] = best;
    roi.winner_distance[o] = best_dist;

    // Neighbor clusters are those sharing at least one RP with the winner.
    std::set<int> winner_members(set.clusters[best].members.begin(),
                                 set.clusters[best].members.end());
    std::set<int> selected_rps;
    for (int k = 0; k < set.cluster_count(); ++k) {
      const bool intersects =
          std::any_of(set.clusters[k].members.begin(), set.clusters[k].members.end(),
                      [&](int j) { return winner_members.count(j) > 0; });
      if (!intersects) continue;
      roi.included_clusters[o].push_back(k);
      selected_rps.insert(set.clusters[k].members.begin(), set.clusters[k].members.end());
    }
    for (int j : selected_rps) {
      tagged.emplace_back(o, j);
      rp_union.insert(j);
    }
  }

  roi.psi.resize(avg.psi[0].rows(), static_cast<Eigen::Index>(tagged.size()));
  roi.columns.reserve(tagged.size());
  for (std::size_t v = 0; v < tagged.size(); ++v) {
    const auto [o, j] = tagged[v];
    roi.psi.col(static_cast<Eigen::Index>(v)) = avg.psi[o].col(j);
    roi.columns.push_back(RoiColumn{j, o});
  }
  roi.roi_rps.assign(rp_union.begin(), rp_union.end());
  return roi;
}

}  // namespace sparseloc
