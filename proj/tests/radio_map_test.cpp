#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "sparseloc/radio_map.hpp"
#include "support/test_maps.hpp"

using namespace sparseloc;

TEST_CASE("time average of constant samples is the constant") {
  RawRadioMap raw = testmap::blank(2, 3, 5, 1, -60.0);
  const AveragedRadioMap avg = time_average(raw);
  CHECK(avg.psi[0](0, 0) == doctest::Approx(-60.0));
  CHECK(avg.psi[0](1, 2) == doctest::Approx(-60.0));
}

TEST_CASE("time average of a two-sample pair is their midpoint") {
  RawRadioMap raw = testmap::blank(1, 1, 2);
  raw.samples[0][0](0, 0) = -50.0;
  raw.samples[0][0](0, 1) = -70.0;
  CHECK(time_average(raw).psi[0](0, 0) == doctest::Approx(-60.0));
}

TEST_CASE("time average matches an independent recomputation on a random survey") {
  RawRadioMap raw = testmap::random_survey(4, 6, 9, 2, 42);
  const AveragedRadioMap avg = time_average(raw);
  for (int o = 0; o < 2; ++o) {
    for (int j = 0; j < 6; ++j) {
      for (int i = 0; i < 4; ++i) {
        double sum = 0.0;
        for (int m = 0; m < 9; ++m) sum += raw.samples[o][j](i, m);
        CHECK(avg.psi[o](i, j) == doctest::Approx(sum / 9.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("reliability flips at nine of ten samples") {
  RawRadioMap raw = testmap::blank(1, 1, 10, 1, -80.0);
  for (int m = 0; m < 9; ++m) raw.samples[0][0](0, m) = -60.0;
  ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  CHECK(rel.counts[0](0, 0) == 9);
  CHECK(rel.indicators[0](0, 0) == 1);

  raw.samples[0][0](0, 8) = -80.0; // now only eight clear the threshold
  rel = reliability_indicators(raw, -70.0);
  CHECK(rel.counts[0](0, 0) == 8);
  CHECK(rel.indicators[0](0, 0) == 0);
}

TEST_CASE("all-sentinel samples are never reliable") {
  const RawRadioMap raw = testmap::blank(2, 2, 4, 1, -100.0);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  CHECK(rel.indicators[0].isZero());
}

TEST_CASE("reliability counts match brute force on a random survey") {
  const RawRadioMap raw = testmap::random_survey(5, 4, 12, 2, 7);
  const double gamma = -70.0;
  const ReliabilityProfile rel = reliability_indicators(raw, gamma);
  for (int o = 0; o < 2; ++o) {
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 5; ++i) {
        int count = 0;
        for (int m = 0; m < 12; ++m) {
          if (raw.samples[o][j](i, m) >= gamma) ++count;
        }
        CHECK(rel.counts[o](i, j) == count);
        CHECK(rel.indicators[o](i, j) == (count >= 11 ? 1 : 0)); // 0.9 * 12 = 10.8
      }
    }
  }
}

TEST_CASE("stability of constant samples is zero") {
  const RawRadioMap raw = testmap::blank(2, 2, 6, 1, -55.0);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  const StabilityProfile stab = stability(raw, rel);
  CHECK(stab.per_ap[0].isZero());
  CHECK(stab.per_rp[0].isZero());
}

TEST_CASE("unbiased variance of {-50, -70} is 200") {
  RawRadioMap raw = testmap::blank(1, 1, 2);
  raw.samples[0][0](0, 0) = -50.0;
  raw.samples[0][0](0, 1) = -70.0;
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  const StabilityProfile stab = stability(raw, rel);
  CHECK(stab.per_ap[0](0, 0) == doctest::Approx(200.0));
}

TEST_CASE("per-rp variance averages only the reliable set") {
  RawRadioMap raw = testmap::blank(3, 1, 4, 1, -60.0);
  // AP 0 variance 2, AP 1 variance 4, AP 2 unreliable.
  raw.samples[0][0].row(0) << -61, -59, -61, -59;   // variance 4/3
  raw.samples[0][0].row(1) << -62, -58, -62, -58;   // variance 16/3
  raw.samples[0][0].row(2).setConstant(-100.0);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  REQUIRE(rel.indicators[0](2, 0) == 0);
  const StabilityProfile stab = stability(raw, rel);
  CHECK(stab.per_rp[0](0) == doctest::Approx((4.0 / 3.0 + 16.0 / 3.0) / 2.0));
}

TEST_CASE("rp with no reliable ap carries an infinite variance marker") {
  const RawRadioMap raw = testmap::blank(2, 2, 4, 1, -100.0);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  const StabilityProfile stab = stability(raw, rel);
  CHECK(std::isinf(stab.per_rp[0](0)));
  CHECK(std::isinf(stab.per_rp[0](1)));
}

TEST_CASE("stability needs two samples") {
  const RawRadioMap raw = testmap::blank(1, 1, 1);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  CHECK_THROWS_AS(stability(raw, rel), std::invalid_argument);
}

TEST_CASE("statistics are invariant under sample permutation") {
  RawRadioMap raw = testmap::random_survey(3, 3, 8, 1, 99);
  const AveragedRadioMap avg = time_average(raw);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  const StabilityProfile stab = stability(raw, rel);

  std::mt19937 shuffle_rng(5);
  RawRadioMap shuffled = raw;
  for (int j = 0; j < 3; ++j) {
    std::vector<int> perm{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(perm.begin(), perm.end(), shuffle_rng);
    for (int m = 0; m < 8; ++m) shuffled.samples[0][j].col(m) = raw.samples[0][j].col(perm[m]);
  }
  const AveragedRadioMap avg2 = time_average(shuffled);
  const ReliabilityProfile rel2 = reliability_indicators(shuffled, -70.0);
  const StabilityProfile stab2 = stability(shuffled, rel2);
  CHECK((avg.psi[0] - avg2.psi[0]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rel.indicators[0] == rel2.indicators[0]);
  CHECK((stab.per_ap[0] - stab2.per_ap[0]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("variance matches a brute-force two-pass computation") {
  const RawRadioMap raw = testmap::random_survey(4, 5, 20, 1, 123);
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  const StabilityProfile stab = stability(raw, rel);
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 4; ++i) {
      double mean = 0.0;
      for (int m = 0; m < 20; ++m) mean += raw.samples[0][j](i, m);
      mean /= 20.0;
      double ss = 0.0;
      for (int m = 0; m < 20; ++m) {
        const double d = raw.samples[0][j](i, m) - mean;
        ss += d * d;
      }
      const double expected = ss / 19.0;
      CHECK(stab.per_ap[0](i, j) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("online reliability thresholds inclusively") {
  Eigen::VectorXd y(2);
  y << -60.0, -80.0;
  Eigen::VectorXi bits = online_reliability(y, -70.0);
  CHECK(bits(0) == 1);
  CHECK(bits(1) == 0);

  y.setConstant(-70.0);
  CHECK(online_reliability(y, -70.0).sum() == 2);

  y.setConstant(-100.0);
  CHECK(online_reliability(y, -70.0).sum() == 0);
}

TEST_CASE("a one-sample survey row agrees with online reliability") {
  const Eigen::VectorXd y = (Eigen::VectorXd(4) << -60, -75, -70, -100).finished();
  RawRadioMap raw = testmap::blank(4, 1, 1);
  raw.samples[0][0].col(0) = y;
  const ReliabilityProfile rel = reliability_indicators(raw, -70.0);
  const Eigen::VectorXi online = online_reliability(y, -70.0);
  CHECK(rel.indicator_vector(0, 0) == online);
}

TEST_CASE("radio map json round-trips and maps nulls to the sentinel") {
  const RawRadioMap raw = testmap::random_survey(3, 4, 5, 2, 21);
  const auto path = std::filesystem::temp_directory_path() / "sparseloc_map_test.json";
  save_radio_map(raw, path);
  const RawRadioMap loaded = load_radio_map(path);
  CHECK(loaded.config.num_aps == 3);
  CHECK(loaded.rps.size() == 4);
  for (int o = 0; o < 2; ++o)
    for (int j = 0; j < 4; ++j)
      CHECK((loaded.samples[o][j] - raw.samples[o][j]).cwiseAbs().maxCoeff() == 0.0);

  // Inject a null sample and reload.
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto pos = text.find("\"samples\":[[[[");
  REQUIRE(pos != std::string::npos);
  const auto comma = text.find(',', pos + 14);
  text = text.substr(0, pos + 14) + "null" + text.substr(comma);
  std::ofstream(path) << text;
  const RawRadioMap patched = load_radio_map(path);
  CHECK(patched.samples[0][0](0, 0) == patched.config.missing_sentinel);
  std::filesystem::remove(path);
}

TEST_CASE("malformed radio map files raise data errors") {
  const auto path = std::filesystem::temp_directory_path() / "sparseloc_bad_map.json";
  std::ofstream(path) << "{\"config\": {}}";
  CHECK_THROWS_AS(load_radio_map(path), DataError);
  std::ofstream(path) << "not json";
  CHECK_THROWS_AS(load_radio_map(path), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("measurement csv round-trips with empty cells as missing") {
  const auto path = std::filesystem::temp_directory_path() / "sparseloc_fixes.csv";
  std::vector<Eigen::VectorXd> rows;
  Eigen::VectorXd a(3);
  a << -60.5, -100.0, -72.25;
  rows.push_back(a);
  save_measurements_csv(rows, path, -100.0);
  const auto loaded = load_measurements_csv(path, 3, -100.0);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0](0) == doctest::Approx(-60.5));
  CHECK(loaded[0](1) == -100.0);
  CHECK(loaded[0](2) == doctest::Approx(-72.25));

  std::ofstream(path) << "-60,alpha,-70\n";
  CHECK_THROWS_AS(load_measurements_csv(path, 3, -100.0), DataError);
  std::filesystem::remove(path);
}

TEST_CASE("config rejects a sentinel at or above the reliability threshold") {
  SurveyConfig config;
  config.num_aps = 1;
  config.num_rps = 1;
  config.samples_per_rp = 2;
  config.missing_sentinel = -60.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
