#include <doctest.h>

#include "sparseloc/roi.hpp"
#include "support/test_maps.hpp"

using namespace sparseloc;

namespace {

// One-orientation fixture with explicit clusters over five RPs.
struct RoiFixture {
  ReliabilityProfile rel;
  AveragedRadioMap avg;
  std::vector<ClusterSet> clusters;
};

RoiFixture fixture() {
  RoiFixture f;
  // Heads 0 and 3; RP 2 sits in both clusters, RP 4 alone.
  f.rel = testmap::profile_from_bits({{1, 1, 1, 1},
                                      {1, 1, 1, 0},
                                      {1, 1, 0, 0},
                                      {1, 0, 0, 0},
                                      {0, 0, 0, 0}});
  Eigen::MatrixXd psi(4, 5);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 4; ++i) psi(i, j) = -40.0 - 10.0 * j - i;
  f.avg.psi.push_back(psi);

  ClusterSet set;
  set.orientation = 0;
  set.clusters.push_back(Cluster{0, {0, 1, 2}});
  set.clusters.push_back(Cluster{3, {2, 3}});
  set.clusters.push_back(Cluster{4, {4}});
  set.membership = {{0}, {0}, {0, 1}, {1}, {2}};
  f.clusters.push_back(set);
  return f;
}

}  // namespace

TEST_CASE("zero-distance winner with a disjoint cluster keeps only that cluster") {
  RoiFixture f = fixture();
  // Make the second cluster disjoint from the first.
  f.clusters[0].clusters[0].members = {0, 1};
  f.clusters[0].clusters[1].members = {2, 3};
  f.clusters[0].membership = {{0}, {0}, {1}, {1}, {2}};

  Eigen::VectorXi online(4);
  online << 1, 1, 1, 1; // identical to head 0's bits
  const ModifiedRadioMap roi = select_roi(online, f.clusters, f.rel, f.avg);
  CHECK(roi.winner_cluster[0] == 0);
  CHECK(roi.winner_distance[0] == 0);
  CHECK(roi.roi_rps == std::vector<int>{0, 1});
  CHECK(roi.column_count() == 2);
}

TEST_CASE("ties between heads resolve to the lowest cluster index") {
  ReliabilityProfile rel = testmap::profile_from_bits({{1, 1, 1, 1}, {0, 0, 0, 0}});
  AveragedRadioMap avg;
  avg.psi.push_back(Eigen::MatrixXd::Constant(4, 2, -60.0));
  ClusterSet set;
  set.orientation = 0;
  set.clusters.push_back(Cluster{0, {0}});
  set.clusters.push_back(Cluster{1, {1}});
  set.membership = {{0}, {1}};

  // Equidistant from both heads.
  Eigen::VectorXi online(4);
  online << 1, 1, 0, 0;
  REQUIRE(hamming_distance(online, rel.indicator_vector(0, 0)) == 2);
  REQUIRE(hamming_distance(online, rel.indicator_vector(0, 1)) == 2);
  const ModifiedRadioMap roi = select_roi(online, {set}, rel, avg);
  CHECK(roi.winner_cluster[0] == 0);
}

TEST_CASE("overlapping neighbor clusters contribute all their rps") {
  RoiFixture f = fixture();
  Eigen::VectorXi online(4);
  online << 1, 1, 1, 1; // winner is cluster 0; RP 2 links cluster 1
  const ModifiedRadioMap roi = select_roi(online, f.clusters, f.rel, f.avg);
  CHECK(roi.winner_cluster[0] == 0);
  CHECK(roi.included_clusters[0] == std::vector<int>{0, 1});
  CHECK(roi.roi_rps == std::vector<int>{0, 1, 2, 3}); // neighbor RP 3 included, RP 4 not
}

TEST_CASE("roi columns copy the averaged map verbatim with tags") {
  RoiFixture f = fixture();
  Eigen::VectorXi online(4);
  online << 1, 1, 1, 1;
  const ModifiedRadioMap roi = select_roi(online, f.clusters, f.rel, f.avg);
  for (int v = 0; v < roi.column_count(); ++v) {
    const RoiColumn& tag = roi.columns[v];
    CHECK((roi.psi.col(v) - f.avg.psi[tag.orientation].col(tag.rp)).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("winner head attains the minimum hamming distance") {
  RoiFixture f = fixture();
  for (int pattern = 0; pattern < 16; ++pattern) {
    Eigen::VectorXi online(4);
    for (int i = 0; i < 4; ++i) online(i) = (pattern >> i) & 1;
    const ModifiedRadioMap roi = select_roi(online, f.clusters, f.rel, f.avg);
    const int winner_head = f.clusters[0].clusters[roi.winner_cluster[0]].head;
    const int winner_dist = hamming_distance(online, f.rel.indicator_vector(0, winner_head));
    for (const auto& c : f.clusters[0].clusters) {
      CHECK(winner_dist <= hamming_distance(online, f.rel.indicator_vector(0, c.head)));
    }
  }
}

TEST_CASE("orientations concatenate independently") {
  RoiFixture f = fixture();
  // Second orientation: same reliability, but only singleton clusters.
  f.rel.indicators.push_back(f.rel.indicators[0]);
  f.rel.counts.push_back(f.rel.counts[0]);
  f.avg.psi.push_back(f.avg.psi[0] * 2.0);
  ClusterSet second;
  second.orientation = 1;
  for (int j = 0; j < 5; ++j) second.clusters.push_back(Cluster{j, {j}});
  second.membership = {{0}, {1}, {2}, {3}, {4}};
  f.clusters.push_back(second);

  Eigen::VectorXi online(4);
  online << 1, 1, 1, 1;
  const ModifiedRadioMap roi = select_roi(online, f.clusters, f.rel, f.avg);
  // First orientation contributes clusters {0,1} union; second just RP 0.
  CHECK(roi.column_count() == 5);
  CHECK(roi.columns.back().orientation == 1);
  CHECK(roi.columns.back().rp == 0);
}

TEST_CASE("empty cluster set is an error") {
  RoiFixture f = fixture();
  f.clusters[0].clusters.clear();
  Eigen::VectorXi online = Eigen::VectorXi::Ones(4);
  CHECK_THROWS_AS(select_roi(online, f.clusters, f.rel, f.avg), std::invalid_argument);
}
