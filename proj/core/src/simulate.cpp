#include "sparseloc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "sparseloc/rng.hpp"

namespace sparseloc {

namespace {

// Stream tags; part of the reproducibility contract.
constexpr std::uint64_t kShadowTag = 1;
constexpr std::uint64_t kTemporalTag = 2;
constexpr std::uint64_t kOrientationTag = 3;
constexpr std::uint64_t kOnlineNoiseTag = 4;

double shadow_value(const EnvironmentSpec& env, int ap, int rp) {
  if (env.shadowing_sigma == 0.0) return 0.0;
  rng::Stream s(env.seed, {kShadowTag, static_cast<std::uint64_t>(ap),
                           static_cast<std::uint64_t>(rp)});
  return env.shadowing_sigma * s.normal();
}

double path_loss_mean(const EnvironmentSpec& env, double ap_x, double ap_y, double x,
                      double y) {
  const double d = std::hypot(ap_x - x, ap_y - y);
  const double effective = std::max(d, env.reference_distance);
  return env.tx_power -
         10.0 * env.path_loss_exponent * std::log10(effective / env.reference_distance);
}

struct GridGeometry {
  double x0, y0;
  int cols, rows;
  double spacing;

  int rp_index(int col, int row) const { return row * cols + col; }
};

GridGeometry geometry(const EnvironmentSpec& env) {
  GridGeometry g;
  g.cols = env.grid_cols;
  g.rows = env.grid_rows;
  g.spacing = env.grid_spacing;
  g.x0 = (env.area_width - (env.grid_cols - 1) * env.grid_spacing) / 2.0;
  g.y0 = (env.area_height - (env.grid_rows - 1) * env.grid_spacing) / 2.0;
  return g;
}

// Bilinear interpolation of the frozen shadow field, clamped to the grid hull.
double shadow_at(const EnvironmentSpec& env, const GridGeometry& g, int ap, double x,
                 double y) {
  if (env.shadowing_sigma == 0.0) return 0.0;
  const double fx = std::clamp((x - g.x0) / g.spacing, 0.0, static_cast<double>(g.cols - 1));
  const double fy = std::clamp((y - g.y0) / g.spacing, 0.0, static_cast<double>(g.rows - 1));
  const int c0 = std::min(static_cast<int>(fx), g.cols - 2 >= 0 ? g.cols - 2 : 0);
  const int r0 = std::min(static_cast<int>(fy), g.rows - 2 >= 0 ? g.rows - 2 : 0);
  const int c1 = std::min(c0 + 1, g.cols - 1);
  const int r1 = std::min(r0 + 1, g.rows - 1);
  const double tx = fx - c0;
  const double ty = fy - r0;
  const double s00 = shadow_value(env, ap, g.rp_index(c0, r0));
  const double s10 = shadow_value(env, ap, g.rp_index(c1, r0));
  const double s01 = shadow_value(env, ap, g.rp_index(c0, r1));
  const double s11 = shadow_value(env, ap, g.rp_index(c1, r1));
  return (1.0 - ty) * ((1.0 - tx) * s00 + tx * s10) + ty * ((1.0 - tx) * s01 + tx * s11);
}

}  // namespace

std::vector<std::pair<double, double>> EnvironmentSpec::default_ap_layout(double width,
                                                                          double height,
                                                                          int count) {
  // Two rows of ceiling-mounted APs spread along the long axis.
  std::vector<std::pair<double, double>> aps;
  const int per_row = (count + 1) / 2;
  for (int row = 0; row < 2 && static_cast<int>(aps.size()) < count; ++row) {
    const double y = height * (row == 0 ? 0.25 : 0.75);
    for (int k = 0; k < per_row && static_cast<int>(aps.size()) < count; ++k) {
      const double x = width * (k + 0.5) / per_row;
      aps.emplace_back(x, y);
    }
  }
  return aps;
}

void EnvironmentSpec::validate() const {
  if (grid_spacing <= 0.0) throw std::invalid_argument("EnvironmentSpec: spacing must be > 0");
  if (grid_cols < 1 || grid_rows < 1)
    throw std::invalid_argument("EnvironmentSpec: grid must have at least one point");
  if ((grid_cols - 1) * grid_spacing > area_width ||
      (grid_rows - 1) * grid_spacing > area_height)
    throw std::invalid_argument("EnvironmentSpec: grid does not fit in the area");
  if (shadowing_sigma < 0.0 || temporal_sigma < 0.0)
    throw std::invalid_argument("EnvironmentSpec: sigmas must be >= 0");
  if (samples_per_rp < 1)
    throw std::invalid_argument("EnvironmentSpec: samples_per_rp must be >= 1");
  if (orientation_bias.empty())
    throw std::invalid_argument("EnvironmentSpec: at least one orientation required");
  // APs must sit inside or near the site.
  for (const auto& [ax, ay] : ap_positions) {
    if (ax < -0.5 * area_width || ax > 1.5 * area_width || ay < -0.5 * area_height ||
        ay > 1.5 * area_height)
      throw std::invalid_argument("EnvironmentSpec: AP position far outside the area");
  }
}

RawRadioMap generate_survey(const EnvironmentSpec& env) {
  env.validate();
  const std::vector<std::pair<double, double>>& aps = env.ap_positions;
  if (aps.empty()) throw std::invalid_argument("generate_survey: empty AP list");

  const GridGeometry g = geometry(env);
  const int num_rps = env.grid_cols * env.grid_rows;
  const int num_aps = static_cast<int>(aps.size());
  const int num_o = static_cast<int>(env.orientation_bias.size());
  const int m_count = env.samples_per_rp;

  RawRadioMap raw;
  raw.config.num_aps = num_aps;
  raw.config.num_rps = num_rps;
  raw.config.samples_per_rp = m_count;
  raw.config.orientations_deg.clear();
  for (int o = 0; o < num_o; ++o) raw.config.orientations_deg.push_back(90.0 * o);
  raw.config.reliability_threshold = env.reliability_threshold;
  raw.config.reliability_fraction = env.reliability_fraction;
  raw.config.eta_fraction = env.eta_fraction;
  raw.config.missing_sentinel = env.missing_sentinel;

  raw.rps.reserve(num_rps);
  for (int row = 0; row < g.rows; ++row) {
    for (int col = 0; col < g.cols; ++col) {
      raw.rps.push_back(ReferencePoint{g.rp_index(col, row) + 1, g.x0 + col * g.spacing,
                                       g.y0 + row * g.spacing});
    }
  }

  raw.samples.assign(num_o, std::vector<Eigen::MatrixXd>(num_rps));
  for (int o = 0; o < num_o; ++o) {
    for (int j = 0; j < num_rps; ++j) {
      Eigen::MatrixXd block(num_aps, m_count);
      for (int i = 0; i < num_aps; ++i) {
        const double mean = path_loss_mean(env, aps[i].first, aps[i].second, raw.rps[j].x,
                                           raw.rps[j].y) +
                            shadow_value(env, i, j) + env.orientation_bias[o];
        for (int m = 0; m < m_count; ++m) {
          double v = mean;
          if (env.temporal_sigma > 0.0) {
            rng::Stream s(env.seed, {kTemporalTag, static_cast<std::uint64_t>(i),
                                     static_cast<std::uint64_t>(j),
                                     static_cast<std::uint64_t>(o) * m_count +
                                         static_cast<std::uint64_t>(m)});
            v += env.temporal_sigma * s.normal();
          }
          block(i, m) = v < env.detection_floor ? env.missing_sentinel : v;
        }
      }
      raw.samples[o][j] = std::move(block);
    }
  }
  return raw;
}

std::pair<OnlineMeasurement, OnlineTruth> generate_online(const EnvironmentSpec& env, double x,
                                                          double y, const OutlierSpec& outliers,
                                                          std::uint64_t seed) {
  env.validate();
  if (x < 0.0 || x > env.area_width || y < 0.0 || y > env.area_height)
    throw std::invalid_argument("generate_online: position outside the area");
  for (int i : outliers.ap_indices) {
    if (i < 0) throw std::invalid_argument("generate_online: negative AP index");
  }

  const std::vector<std::pair<double, double>>& aps = env.ap_positions;
  if (aps.empty()) throw std::invalid_argument("generate_online: empty AP list");
  const GridGeometry g = geometry(env);
  const int num_aps = static_cast<int>(aps.size());
  const int num_o = static_cast<int>(env.orientation_bias.size());

  rng::Stream orient_stream(seed, {kOrientationTag});
  const int o = static_cast<int>(orient_stream.uniform_below(num_o));

  Eigen::VectorXd rss(num_aps);
  for (int i = 0; i < num_aps; ++i) {
    double v = path_loss_mean(env, aps[i].first, aps[i].second, x, y) +
               shadow_at(env, g, i, x, y) + env.orientation_bias[o];
    if (env.temporal_sigma > 0.0) {
      rng::Stream s(seed, {kOnlineNoiseTag, static_cast<std::uint64_t>(i)});
      v += env.temporal_sigma * s.normal();
    }
    const bool tagged = std::find(outliers.ap_indices.begin(), outliers.ap_indices.end(), i) !=
                        outliers.ap_indices.end();
    if (tagged && outliers.mode == OutlierSpec::Mode::kBias) v += outliers.bias_magnitude;
    if (v < env.detection_floor) v = env.missing_sentinel;
    if (tagged && outliers.mode == OutlierSpec::Mode::kDropout) v = env.missing_sentinel;
    rss(i) = v;
  }

  OnlineTruth truth{x, y, o, outliers.ap_indices};
  return {OnlineMeasurement::from_rss(std::move(rss), env.reliability_threshold),
          std::move(truth)};
}

std::string EnvironmentSpec::to_json() const {
  nlohmann::json aps = nlohmann::json::array();
  for (const auto& [ax, ay] : ap_positions) aps.push_back(nlohmann::json{{"x", ax}, {"y", ay}});
  nlohmann::json doc{{"area_width", area_width},
                     {"area_height", area_height},
                     {"grid_spacing", grid_spacing},
                     {"grid_cols", grid_cols},
                     {"grid_rows", grid_rows},
                     {"ap_positions", std::move(aps)},
                     {"tx_power", tx_power},
                     {"reference_distance", reference_distance},
                     {"path_loss_exponent", path_loss_exponent},
                     {"shadowing_sigma", shadowing_sigma},
                     {"temporal_sigma", temporal_sigma},
                     {"orientation_bias", orientation_bias},
                     {"detection_floor", detection_floor},
                     {"samples_per_rp", samples_per_rp},
                     {"seed", seed},
                     {"reliability_threshold", reliability_threshold},
                     {"reliability_fraction", reliability_fraction},
                     {"eta_fraction", eta_fraction},
                     {"missing_sentinel", missing_sentinel}};
  return doc.dump();
}

EnvironmentSpec EnvironmentSpec::from_json(const std::string& text) {
  EnvironmentSpec env;
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    env.area_width = doc.at("area_width").get<double>();
    env.area_height = doc.at("area_height").get<double>();
    env.grid_spacing = doc.at("grid_spacing").get<double>();
    env.grid_cols = doc.at("grid_cols").get<int>();
    env.grid_rows = doc.at("grid_rows").get<int>();
    env.ap_positions.clear();
    for (const auto& ap : doc.at("ap_positions"))
      env.ap_positions.emplace_back(ap.at("x").get<double>(), ap.at("y").get<double>());
    env.tx_power = doc.at("tx_power").get<double>();
    env.reference_distance = doc.at("reference_distance").get<double>();
    env.path_loss_exponent = doc.at("path_loss_exponent").get<double>();
    env.shadowing_sigma = doc.at("shadowing_sigma").get<double>();
    env.temporal_sigma = doc.at("temporal_sigma").get<double>();
    env.orientation_bias = doc.at("orientation_bias").get<std::vector<double>>();
    env.detection_floor = doc.at("detection_floor").get<double>();
    env.samples_per_rp = doc.at("samples_per_rp").get<int>();
    env.seed = doc.at("seed").get<std::uint64_t>();
    env.reliability_threshold = doc.at("reliability_threshold").get<double>();
    env.reliability_fraction = doc.at("reliability_fraction").get<double>();
    env.eta_fraction = doc.at("eta_fraction").get<double>();
    env.missing_sentinel = doc.at("missing_sentinel").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("environment spec: ") + e.what());
  }
  return env;
}

}  // namespace sparseloc
