#pragma once

#include "sparseloc/localize_types.hpp"
#include "sparseloc/radio_map.hpp"

namespace sparseloc {

struct BaselineConfig {
  int k = 10;                  ///< neighbor count for wknn
  double kernel_sigma = 5.0;   ///< dBm, Gaussian kernel width for kde
  double distance_floor = 1e-6;
};

/// Weighted k-nearest-neighbors over the averaged map. Per-RP distance is
/// the minimum over orientations of the Euclidean fingerprint distance;
/// weights are inverse distances floored at distance_floor.
PositionEstimate wknn(const OnlineMeasurement& y, const AveragedRadioMap& avg,
                      const std::vector<ReferencePoint>& rps, const BaselineConfig& cfg);

/// Gaussian-kernel weighted centroid over all RPs.
PositionEstimate kde(const OnlineMeasurement& y, const AveragedRadioMap& avg,
                     const std::vector<ReferencePoint>& rps, const BaselineConfig& cfg);

}  // namespace sparseloc
