#include "sparseloc/radio_map.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sparseloc {

namespace {

using nlohmann::json;

constexpr double kCountEps = 1e-9;

}  // namespace

int SurveyConfig::hamming_cap() const {
  return static_cast<int>(std::floor((1.0 - eta_fraction) * num_aps + kCountEps));
}

void SurveyConfig::validate() const {
  if (num_aps < 1) throw std::invalid_argument("SurveyConfig: num_aps must be >= 1");
  if (num_rps < 1) throw std::invalid_argument("SurveyConfig: num_rps must be >= 1");
  if (samples_per_rp < 1)
    throw std::invalid_argument("SurveyConfig: samples_per_rp must be >= 1");
  if (orientations_deg.empty())
    throw std::invalid_argument("SurveyConfig: at least one orientation required");
  if (!(missing_sentinel < reliability_threshold))
    throw std::invalid_argument(
        "SurveyConfig: missing_sentinel must lie below the reliability threshold");
  if (reliability_fraction <= 0.0 || reliability_fraction > 1.0)
    throw std::invalid_argument("SurveyConfig: reliability_fraction must be in (0, 1]");
  if (eta_fraction <= 0.0 || eta_fraction > 1.0)
    throw std::invalid_argument("SurveyConfig: eta_fraction must be in (0, 1]");
}

void RawRadioMap::validate() const {
  config.validate();
  const int num_o = config.num_orientations();
  if (static_cast<int>(rps.size()) != config.num_rps)
    throw std::invalid_argument("RawRadioMap: rps size disagrees with config");
  for (int j = 0; j < config.num_rps; ++j) {
    if (rps[j].id != j + 1)
      throw std::invalid_argument("RawRadioMap: rp ids must be contiguous starting at 1");
  }
  if (static_cast<int>(samples.size()) != num_o)
    throw std::invalid_argument("RawRadioMap: orientation count disagrees with config");
  for (int o = 0; o < num_o; ++o) {
    if (static_cast<int>(samples[o].size()) != config.num_rps)
      throw std::invalid_argument("RawRadioMap: rp count disagrees with config");
    for (const auto& block : samples[o]) {
      if (block.rows() != config.num_aps || block.cols() != config.samples_per_rp)
        throw std::invalid_argument("RawRadioMap: sample block has wrong shape");
    }
  }
}

std::vector<int> ReliabilityProfile::reliable_set(int o, int j) const {
  std::vector<int> set;
  for (int i = 0; i < indicators[o].rows(); ++i) {
    if (indicators[o](i, j) != 0) set.push_back(i);
  }
  return set;
}

OnlineMeasurement OnlineMeasurement::from_rss(Eigen::VectorXd rss, double gamma) {
  OnlineMeasurement m;
  m.reliability = online_reliability(rss, gamma);
  m.rss = std::move(rss);
  return m;
}

AveragedRadioMap time_average(const RawRadioMap& raw) {
  raw.validate();
  const int num_o = raw.config.num_orientations();
  AveragedRadioMap avg;
  avg.psi.resize(num_o);
  for (int o = 0; o < num_o; ++o) {
    Eigen::MatrixXd psi(raw.config.num_aps, raw.config.num_rps);
    for (int j = 0; j < raw.config.num_rps; ++j) psi.col(j) = raw.samples[o][j].rowwise().mean();
    avg.psi[o] = std::move(psi);
  }
  return avg;
}

ReliabilityProfile reliability_indicators(const RawRadioMap& raw, double gamma) {
  raw.validate();
  const int num_o = raw.config.num_orientations();
  const double required = raw.config.reliability_fraction * raw.config.samples_per_rp;
  ReliabilityProfile rel;
  rel.counts.resize(num_o);
  rel.indicators.resize(num_o);
  for (int o = 0; o < num_o; ++o) {
    Eigen::MatrixXi counts(raw.config.num_aps, raw.config.num_rps);
    Eigen::MatrixXi bits(raw.config.num_aps, raw.config.num_rps);
    for (int j = 0; j < raw.config.num_rps; ++j) {
      const Eigen::MatrixXd& block = raw.samples[o][j];
      for (int i = 0; i < raw.config.num_aps; ++i) {
        const int c = static_cast<int>((block.row(i).array() >= gamma).count());
        counts(i, j) = c;
        bits(i, j) = (static_cast<double>(c) >= required - kCountEps) ? 1 : 0;
      }
    }
    rel.counts[o] = std::move(counts);
    rel.indicators[o] = std::move(bits);
  }
  return rel;
}

StabilityProfile stability(const RawRadioMap& raw, const ReliabilityProfile& rel) {
  raw.validate();
  if (raw.config.samples_per_rp < 2)
    throw std::invalid_argument("stability: needs at least two samples per RP");
  const int num_o = raw.config.num_orientations();
  const double norm = 1.0 / (raw.config.samples_per_rp - 1);
  StabilityProfile stab;
  stab.per_ap.resize(num_o);
  stab.per_rp.resize(num_o);
  for (int o = 0; o < num_o; ++o) {
    Eigen::MatrixXd per_ap(raw.config.num_aps, raw.config.num_rps);
    Eigen::VectorXd per_rp(raw.config.num_rps);
    for (int j = 0; j < raw.config.num_rps; ++j) {
      const Eigen::MatrixXd& block = raw.samples[o][j];
      const Eigen::VectorXd mean = block.rowwise().mean();
      per_ap.col(j) = (block.colwise() - mean).rowwise().squaredNorm() * norm;

      double sum = 0.0;
      int reliable = 0;
      for (int i = 0; i < raw.config.num_aps; ++i) {
        if (rel.indicators[o](i, j) != 0) {
          sum += per_ap(i, j);
          ++reliable;
        }
      }
      per_rp(j) = reliable > 0 ? sum / reliable : std::numeric_limits<double>::infinity();
    }
    stab.per_ap[o] = std::move(per_ap);
    stab.per_rp[o] = std::move(per_rp);
  }
  return stab;
}

Eigen::VectorXi online_reliability(const Eigen::VectorXd& y, double gamma) {
  return (y.array() >= gamma).cast<int>();
}

namespace {

json config_to_json(const SurveyConfig& c) {
  return json{{"num_aps", c.num_aps},
              {"num_rps", c.num_rps},
              {"samples_per_rp", c.samples_per_rp},
              {"orientations", c.orientations_deg},
              {"reliability_threshold", c.reliability_threshold},
              {"reliability_fraction", c.reliability_fraction},
              {"eta_fraction", c.eta_fraction},
              {"missing_sentinel", c.missing_sentinel}};
}

SurveyConfig config_from_json(const json& j) {
  SurveyConfig c;
  try {
    c.num_aps = j.at("num_aps").get<int>();
    c.num_rps = j.at("num_rps").get<int>();
    c.samples_per_rp = j.at("samples_per_rp").get<int>();
    c.orientations_deg = j.at("orientations").get<std::vector<double>>();
    c.reliability_threshold = j.at("reliability_threshold").get<double>();
    c.reliability_fraction = j.value("reliability_fraction", 0.9);
    c.eta_fraction = j.value("eta_fraction", 0.92);
    c.missing_sentinel = j.at("missing_sentinel").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("radio map config: ") + e.what());
  }
  return c;
}

}  // namespace

void save_radio_map(const RawRadioMap& raw, const std::filesystem::path& path,
                    const std::string* environment_json) {
  raw.validate();
  json doc;
  doc["config"] = config_to_json(raw.config);
  json rps = json::array();
  for (const auto& rp : raw.rps) rps.push_back(json{{"id", rp.id}, {"x", rp.x}, {"y", rp.y}});
  doc["rps"] = std::move(rps);

  json all_orientations = json::array();
  for (int o = 0; o < raw.config.num_orientations(); ++o) {
    json per_rp = json::array();
    for (int j = 0; j < raw.config.num_rps; ++j) {
      json per_ap = json::array();
      for (int i = 0; i < raw.config.num_aps; ++i) {
        json row = json::array();
        for (int m = 0; m < raw.config.samples_per_rp; ++m) row.push_back(raw.samples[o][j](i, m));
        per_ap.push_back(std::move(row));
      }
      per_rp.push_back(std::move(per_ap));
    }
    all_orientations.push_back(std::move(per_rp));
  }
  doc["samples"] = std::move(all_orientations);
  if (environment_json != nullptr) doc["environment"] = json::parse(*environment_json);

  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << doc.dump() << '\n';
}

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

RawRadioMap load_radio_map(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  RawRadioMap raw;
  if (!doc.contains("config") || !doc.contains("rps") || !doc.contains("samples"))
    throw DataError(path.string() + ": expected top-level keys config, rps, samples");
  raw.config = config_from_json(doc["config"]);

  try {
    for (const auto& rp : doc.at("rps")) {
      raw.rps.push_back(ReferencePoint{rp.at("id").get<int>(), rp.at("x").get<double>(),
                                       rp.at("y").get<double>()});
    }
    const auto& samples = doc.at("samples");
    raw.samples.resize(samples.size());
    for (std::size_t o = 0; o < samples.size(); ++o) {
      const auto& per_rp = samples[o];
      raw.samples[o].reserve(per_rp.size());
      for (const auto& per_ap : per_rp) {
        Eigen::MatrixXd block(raw.config.num_aps, raw.config.samples_per_rp);
        if (static_cast<int>(per_ap.size()) != raw.config.num_aps)
          throw DataError(path.string() + ": samples row has wrong AP count");
        for (int i = 0; i < raw.config.num_aps; ++i) {
          const auto& row = per_ap[i];
          if (static_cast<int>(row.size()) != raw.config.samples_per_rp)
            throw DataError(path.string() + ": samples row has wrong length");
          for (int m = 0; m < raw.config.samples_per_rp; ++m) {
            block(i, m) =
                row[m].is_null() ? raw.config.missing_sentinel : row[m].get<double>();
          }
        }
        raw.samples[o].push_back(std::move(block));
      }
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  raw.validate();
  return raw;
}

std::optional<std::string> load_radio_map_environment(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  if (!doc.contains("environment")) return std::nullopt;
  return doc["environment"].dump();
}

std::vector<Eigen::VectorXd> load_measurements_csv(const std::filesystem::path& path,
                                                   int num_aps, double missing_sentinel) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::vector<Eigen::VectorXd> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Eigen::VectorXd row(num_aps);
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= num_aps)
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": too many columns");
      if (cell.empty()) {
        row(col) = missing_sentinel;
      } else {
        try {
          row(col) = std::stod(cell);
        } catch (const std::exception&) {
          throw DataError(path.string() + ":" + std::to_string(line_no) + ": field " +
                          std::to_string(col + 1) + " is not a number: '" + cell + "'");
        }
      }
      ++col;
    }
    // A trailing empty cell is swallowed by getline; treat it as missing.
    if (col == num_aps - 1 && !line.empty() && line.back() == ',') row(col++) = missing_sentinel;
    if (col != num_aps)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(num_aps) + " columns, got " + std::to_string(col));
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_measurements_csv(const std::vector<Eigen::VectorXd>& rows,
                           const std::filesystem::path& path, double missing_sentinel) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  char buf[64];
  for (const auto& row : rows) {
    for (int i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      if (row(i) != missing_sentinel) {
        std::snprintf(buf, sizeof(buf), "%.6f", row(i));
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace sparseloc
