#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sparseloc {

/// Survey-wide parameters shared by the offline and online phases.
struct SurveyConfig {
  int num_aps = 0;        ///< L, number of access points
  int num_rps = 0;        ///< N, number of reference points
  int samples_per_rp = 0; ///< M, readings per (RP, AP, orientation)
  std::vector<double> orientations_deg = {0.0, 90.0, 180.0, 270.0};
  double reliability_threshold = -70.0; ///< gamma, dBm
  double reliability_fraction = 0.9;    ///< fraction of samples that must clear gamma
  double eta_fraction = 0.92;           ///< cluster-agreement fraction of the AP count
  double missing_sentinel = -100.0;     ///< dBm stand-in for a non-detected AP

  int num_orientations() const { return static_cast<int>(orientations_deg.size()); }

  /// Largest Hamming distance two reliability vectors may have while still
  /// agreeing on an eta_fraction share of their bits.
  int hamming_cap() const;

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

struct ReferencePoint {
  int id = 0; ///< 1-based, contiguous
  double x = 0.0;
  double y = 0.0;
};

/// Full time series of survey readings. samples[o][j] is an L x M matrix
/// holding r(i, m) for orientation o and reference point j; non-detections
/// are stored as the config sentinel.
struct RawRadioMap {
  SurveyConfig config;
  std::vector<ReferencePoint> rps;
  std::vector<std::vector<Eigen::MatrixXd>> samples;

  double sample(int o, int j, int i, int m) const { return samples[o][j](i, m); }
  void validate() const;
};

/// Per-orientation time averages; psi[o] is L x N with one fingerprint
/// column per reference point.
struct AveragedRadioMap {
  std::vector<Eigen::MatrixXd> psi;
};

/// Which APs clear the reliability threshold often enough at each RP.
struct ReliabilityProfile {
  std::vector<Eigen::MatrixXi> counts;     ///< counts[o](i, j): samples at or above gamma
  std::vector<Eigen::MatrixXi> indicators; ///< 0/1 reliability bits, same layout

  Eigen::VectorXi indicator_vector(int o, int j) const { return indicators[o].col(j); }
  std::vector<int> reliable_set(int o, int j) const;
};

/// Unbiased sample variances of the survey readings. An RP with no reliable
/// AP carries +infinity so it can never win a cluster-head election.
struct StabilityProfile {
  std::vector<Eigen::MatrixXd> per_ap; ///< per_ap[o](i, j)
  std::vector<Eigen::VectorXd> per_rp; ///< per_rp[o](j), mean over the reliable set
};

/// One online RSS vector plus its reliability bits.
struct OnlineMeasurement {
  Eigen::VectorXd rss;         ///< length L, dBm, sentinel where missing
  Eigen::VectorXi reliability; ///< length L, 0/1

  static OnlineMeasurement from_rss(Eigen::VectorXd rss, double gamma);
};

AveragedRadioMap time_average(const RawRadioMap& raw);

/// Reliability counts/bits per (RP, AP, orientation). The fraction of
/// samples required comes from raw.config.reliability_fraction.
ReliabilityProfile reliability_indicators(const RawRadioMap& raw, double gamma);

/// Requires M >= 2; variance normalizer is 1/(M-1).
StabilityProfile stability(const RawRadioMap& raw, const ReliabilityProfile& rel);

/// Online reliability bits: 1 where y(i) >= gamma.
Eigen::VectorXi online_reliability(const Eigen::VectorXd& y, double gamma);

/// Thrown on malformed input files; carries a location hint (line or field).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radio-map JSON: {config, rps: [{id, x, y}], samples: per orientation an
/// N x L x M array in dBm}. JSON nulls load as the missing sentinel.
/// `environment_json`, when present, is stored verbatim under "environment"
/// so downstream tools can regenerate online fixes.
void save_radio_map(const RawRadioMap& raw, const std::filesystem::path& path,
                    const std::string* environment_json = nullptr);
RawRadioMap load_radio_map(const std::filesystem::path& path);
std::optional<std::string> load_radio_map_environment(const std::filesystem::path& path);

/// Measurement CSV: one row per fix, L dBm columns, empty cell = missing.
std::vector<Eigen::VectorXd> load_measurements_csv(const std::filesystem::path& path,
                                                   int num_aps, double missing_sentinel);
void save_measurements_csv(const std::vector<Eigen::VectorXd>& rows,
                           const std::filesystem::path& path, double missing_sentinel);

}  // namespace sparseloc
