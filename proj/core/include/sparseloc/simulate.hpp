#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sparseloc/radio_map.hpp"

namespace sparseloc {

/// Synthetic survey environment: log-distance path loss with per-(AP, RP)
/// frozen shadowing, per-sample temporal noise, per-orientation bias, and a
/// detection floor below which readings become the missing sentinel.
///
/// The default layout is a 96 x 2 corridor grid at 3 ft spacing (192 points)
/// centered in a 300 ft x 35 ft site, with 20 APs on a uniform lattice.
struct EnvironmentSpec {
  double area_width = 300.0;  ///< feet
  double area_height = 35.0;  ///< feet
  double grid_spacing = 3.0;  ///< feet
  int grid_cols = 96;
  int grid_rows = 2;
  std::vector<std::pair<double, double>> ap_positions = default_ap_layout(300.0, 35.0);
  double tx_power = -30.0;          ///< dBm at the reference distance
  double reference_distance = 3.0;  ///< feet
  double path_loss_exponent = 3.0;
  double shadowing_sigma = 4.0;     ///< dB, frozen per (AP, RP)
  double temporal_sigma = 2.0;      ///< dB, fresh per sample
  std::vector<double> orientation_bias = {0.0, -1.5, -3.0, -1.5}; ///< dB
  double detection_floor = -95.0;   ///< dBm
  int samples_per_rp = 100;
  std::uint64_t seed = 0;

  // Survey-side thresholds carried into the generated map's config.
  double reliability_threshold = -70.0;
  double reliability_fraction = 0.9;
  double eta_fraction = 0.92;
  double missing_sentinel = -100.0;

  static std::vector<std::pair<double, double>> default_ap_layout(double width, double height,
                                                                  int count = 20);
  void validate() const;

  std::string to_json() const;
  static EnvironmentSpec from_json(const std::string& text);
};

/// Outlier injection for online fixes: additive bias or full dropout on the
/// listed AP indices (0-based).
struct OutlierSpec {
  enum class Mode { kBias, kDropout };
  std::vector<int> ap_indices;
  Mode mode = Mode::kBias;
  double bias_magnitude = 30.0;
};

struct OnlineTruth {
  double x = 0.0;
  double y = 0.0;
  int orientation = 0;
  std::vector<int> outlier_aps;
};

/// Generates the full survey radio map. Reproducible bit-for-bit from
/// (spec, spec.seed): shadowing uses streams keyed (seed, shadow, ap, rp) and
/// temporal noise (seed, temporal, ap, rp, o*M + m).
RawRadioMap generate_survey(const EnvironmentSpec& env);

/// Draws one online RSS vector at an arbitrary in-area position from the same
/// propagation model. The shadow field between grid points is the bilinear
/// interpolation of the frozen per-RP shadows, so on-grid fixes see exactly
/// the surveyed field. The device orientation and measurement noise derive
/// from `seed` (independent of the survey seed).
std::pair<OnlineMeasurement, OnlineTruth> generate_online(const EnvironmentSpec& env, double x,
                                                          double y, const OutlierSpec& outliers,
                                                          std::uint64_t seed);

}  // namespace sparseloc
