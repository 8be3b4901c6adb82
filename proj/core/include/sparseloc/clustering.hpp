#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sparseloc/radio_map.hpp"

namespace sparseloc {

/// Pairwise Hamming distances between reliability vectors and the derived
/// similarity weights for one orientation. Similarity is 1/H for distinct
/// vectors and lambda_cap (a value exceeding every attainable similarity)
/// for identical ones; the diagonal is not meaningful and stored as 0.
struct SimilarityGraph {
  int orientation = 0;
  int num_aps = 0;
  Eigen::MatrixXi hamming;
  Eigen::MatrixXd similarity;
  double lambda_cap = 0.0;
};

struct Cluster {
  int head = 0;             ///< RP index with minimum stability variance
  std::vector<int> members; ///< sorted ascending, includes the head
};

/// Overlapped clusters for one orientation. Every RP belongs to at least one
/// cluster; boundary RPs may belong to several.
struct ClusterSet {
  int orientation = 0;
  std::vector<Cluster> clusters;
  std::vector<std::vector<int>> membership; ///< per RP: indices of containing clusters

  int cluster_count() const { return static_cast<int>(clusters.size()); }
};

int hamming_distance(const Eigen::VectorXi& a, const Eigen::VectorXi& b);

SimilarityGraph build_similarity_graph(const ReliabilityProfile& rel, int orientation);

/// Forms overlapped clusters from the similarity graph.
///
/// Seeds are taken in ascending RP index from the shrinking candidate set;
/// each seed gathers the remaining candidates within the Hamming cap implied
/// by eta_fraction. Every cluster is then rebuilt around its minimum-variance
/// member until head and membership agree, which makes the head the variance
/// minimizer of its final member set and every member pass the agreement test
/// against the head. RPs orphaned by the rebuild become singleton clusters.
ClusterSet build_clusters(const SimilarityGraph& graph, const StabilityProfile& stab,
                          double eta_fraction);

/// JSON dump (heads and member lists, 1-based RP ids) for inspection.
std::string cluster_sets_to_json(const std::vector<ClusterSet>& sets,
                                 const SurveyConfig& config);

}  // namespace sparseloc
