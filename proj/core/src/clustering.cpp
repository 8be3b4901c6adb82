#include "sparseloc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace sparseloc {

int hamming_distance(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("hamming_distance: vectors differ in length");
  return (a - b).cwiseAbs().sum();
}

SimilarityGraph build_similarity_graph(const ReliabilityProfile& rel, int orientation) {
  const Eigen::MatrixXi& bits = rel.indicators[orientation];
  const int num_rps = static_cast<int>(bits.cols());
  const int num_aps = static_cast<int>(bits.rows());

  SimilarityGraph g;
  g.orientation = orientation;
  g.num_aps = num_aps;
  g.lambda_cap = num_aps + 1.0;
  g.hamming.setZero(num_rps, num_rps);
  g.similarity.setZero(num_rps, num_rps);
  for (int j = 0; j < num_rps; ++j) {
    for (int jj = j + 1; jj < num_rps; ++jj) {
      const int h = (bits.col(j) - bits.col(jj)).cwiseAbs().sum();
      g.hamming(j, jj) = h;
      g.hamming(jj, j) = h;
      const double s = h != 0 ? 1.0 / h : g.lambda_cap;
      g.similarity(j, jj) = s;
      g.similarity(jj, j) = s;
    }
  }
  return g;
}

namespace {

// Lexicographic (variance, index) key used for head elections.
bool head_precedes(double var_a, int a, double var_b, int b) {
  if (var_a != var_b) return var_a < var_b;
  return a < b;
}

std::vector<int> ball_of(const Eigen::MatrixXi& hamming, int center, int cap) {
  std::vector<int> members;
  const int n = static_cast<int>(hamming.rows());
  for (int j = 0; j < n; ++j) {
    if (j == center) continue;
    if (hamming(j, center) <= cap) members.push_back(j);
  }
  return members;
}

}  // namespace

ClusterSet build_clusters(const SimilarityGraph& graph, const StabilityProfile& stab,
                          double eta_fraction) {
  const int num_rps = static_cast<int>(graph.hamming.rows());
  if (num_rps == 0) throw std::invalid_argument("build_clusters: empty RP set");
  const Eigen::VectorXd& variance = stab.per_rp[graph.orientation];
  const int cap =
      static_cast<int>(std::floor((1.0 - eta_fraction) * graph.num_aps + 1e-9));

  // Seed pass over the shrinking candidate set.
  std::vector<bool> candidate(num_rps, true);
  std::vector<std::vector<int>> base;
  for (int seed = 0; seed < num_rps; ++seed) {
    if (!candidate[seed]) continue;
    std::vector<int> members{seed};
    for (int j = seed + 1; j < num_rps; ++j) {
      if (candidate[j] && graph.hamming(j, seed) <= cap) members.push_back(j);
    }
    for (int j : members) candidate[j] = false;
    base.push_back(std::move(members));
  }

  // Rebuild each cluster around its minimum-variance member until stable.
  // The (variance, index) key of the head strictly decreases on every switch,
  // so the loop terminates; at the fixed point the head minimizes variance
  // over exactly the RPs that pass the agreement test against it.
  ClusterSet set;
  set.orientation = graph.orientation;
  std::vector<bool> head_taken(num_rps, false);
  for (const auto& members : base) {
    int head = members.front();
    for (int j : members) {
      if (head_precedes(variance(j), j, variance(head), head)) head = j;
    }
    while (true) {
      std::vector<int> ball = ball_of(graph.hamming, head, cap);
      int next = head;
      for (int j : ball) {
        if (head_precedes(variance(j), j, variance(next), next)) next = j;
      }
      if (next == head) {
        if (!head_taken[head]) {
          head_taken[head] = true;
          ball.push_back(head);
          std::sort(ball.begin(), ball.end());
          set.clusters.push_back(Cluster{head, std::move(ball)});
        }
        break;
      }
      head = next;
    }
  }

  // Any RP dropped by the rebuilds becomes its own singleton cluster.
  std::vector<bool> covered(num_rps, false);
  for (const auto& c : set.clusters)
    for (int j : c.members) covered[j] = true;
  for (int j = 0; j < num_rps; ++j) {
    if (!covered[j]) set.clusters.push_back(Cluster{j, {j}});
  }

  set.membership.assign(num_rps, {});
  for (int k = 0; k < set.cluster_count(); ++k)
    for (int j : set.clusters[k].members) set.membership[j].push_back(k);
  return set;
}

std::string cluster_sets_to_json(const std::vector<ClusterSet>& sets,
                                 const SurveyConfig& config) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& set : sets) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : set.clusters) {
      std::vector<int> ids;
      for (int j : c.members) ids.push_back(j + 1);
      clusters.push_back(nlohmann::json{{"head", c.head + 1}, {"members", ids}});
    }
    doc.push_back(nlohmann::json{
        {"orientation", config.orientations_deg[set.orientation]},
        {"clusters", std::move(clusters)}});
  }
  return doc.dump(2);
}

}  // namespace sparseloc
