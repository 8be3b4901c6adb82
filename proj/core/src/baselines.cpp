#include "sparseloc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sparseloc {

namespace {

// Per-RP fingerprint distance, minimized over orientations.
struct RpDistance {
  double distance;
  int orientation;
};

std::vector<RpDistance> distances(const OnlineMeasurement& y, const AveragedRadioMap& avg) {
  const int num_rps = static_cast<int>(avg.psi[0].cols());
  std::vector<RpDistance> out(num_rps);
  for (int j = 0; j < num_rps; ++j) {
    double best = std::numeric_limits<double>::infinity();
    int best_o = 0;
    for (std::size_t o = 0; o < avg.psi.size(); ++o) {
      const double d = (y.rss - avg.psi[o].col(j)).norm();
      if (d < best) {
        best = d;
        best_o = static_cast<int>(o);
      }
    }
    out[j] = {best, best_o};
  }
  return out;
}

}  // namespace

PositionEstimate wknn(const OnlineMeasurement& y, const AveragedRadioMap& avg,
                      const std::vector<ReferencePoint>& rps, const BaselineConfig& cfg) {
  const int num_rps = static_cast<int>(rps.size());
  if (cfg.k < 1 || cfg.k > num_rps)
    throw std::invalid_argument("wknn: k must be in [1, N]");
  const std::vector<RpDistance> d = distances(y, avg);

  std::vector<int> order(num_rps);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (d[a].distance != d[b].distance) return d[a].distance < d[b].distance;
    return a < b;
  });

  PositionEstimate est;
  est.method = "wknn";
  double weight_sum = 0.0;
  for (int r = 0; r < cfg.k; ++r) {
    const int j = order[r];
    const double w = 1.0 / std::max(d[j].distance, cfg.distance_floor);
    est.x += w * rps[j].x;
    est.y += w * rps[j].y;
    weight_sum += w;
    est.support.push_back(SupportEntry{j, d[j].orientation, w});
  }
  est.x /= weight_sum;
  est.y /= weight_sum;
  for (auto& s : est.support) s.coefficient /= weight_sum;
  return est;
}

PositionEstimate kde(const OnlineMeasurement& y, const AveragedRadioMap& avg,
                     const std::vector<ReferencePoint>& rps, const BaselineConfig& cfg) {
  if (cfg.kernel_sigma <= 0.0) throw std::invalid_argument("kde: sigma must be > 0");
  const int num_rps = static_cast<int>(rps.size());
  const std::vector<RpDistance> d = distances(y, avg);

  double min_sq = std::numeric_limits<double>::infinity();
  for (const auto& e : d) min_sq = std::min(min_sq, e.distance * e.distance);

  // Weights are shifted by the smallest squared distance before
  // exponentiation; the common factor cancels in the normalization.
  std::vector<double> w(num_rps);
  double weight_sum = 0.0;
  for (int j = 0; j < num_rps; ++j) {
    w[j] = std::exp(-(d[j].distance * d[j].distance - min_sq) /
                    (2.0 * cfg.kernel_sigma * cfg.kernel_sigma));
    weight_sum += w[j];
  }

  PositionEstimate est;
  est.method = "kde";
  if (!(weight_sum > 0.0) || !std::isfinite(weight_sum)) {
    const auto nearest = std::min_element(d.begin(), d.end(), [](const auto& a, const auto& b) {
      return a.distance < b.distance;
    });
    const int j = static_cast<int>(nearest - d.begin());
    est.x = rps[j].x;
    est.y = rps[j].y;
    est.low_confidence = true;
    est.support.push_back(SupportEntry{j, d[j].orientation, 1.0});
    return est;
  }

  for (int j = 0; j < num_rps; ++j) {
    const double wj = w[j] / weight_sum;
    est.x += wj * rps[j].x;
    est.y += wj * rps[j].y;
    if (wj >= 1e-3) est.support.push_back(SupportEntry{j, d[j].orientation, wj});
  }
  return est;
}

}  // namespace sparseloc
