#include "sparseloc/localize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace sparseloc {

TrainedModel TrainedModel::train(const RawRadioMap& raw) {
  raw.validate();
  if (raw.config.samples_per_rp < 2)
    throw std::invalid_argument("train: needs at least two samples per RP");
  TrainedModel model;
  model.config = raw.config;
  model.rps = raw.rps;
  model.avg = time_average(raw);
  model.rel = reliability_indicators(raw, raw.config.reliability_threshold);
  model.stab = stability(raw, model.rel);
  for (int o = 0; o < raw.config.num_orientations(); ++o) {
    const SimilarityGraph graph = build_similarity_graph(model.rel, o);
    model.clusters.push_back(build_clusters(graph, model.stab, raw.config.eta_fraction));
  }
  return model;
}

PositionEstimate postprocess(const Eigen::VectorXd& theta, const std::vector<RoiColumn>& tags,
                             const std::vector<ReferencePoint>& rps, double beta) {
  if (static_cast<int>(tags.size()) != theta.size())
    throw std::invalid_argument("postprocess: tags and coefficients disagree in length");

  PositionEstimate est;
  double weight_sum = 0.0;
  for (int v = 0; v < theta.size(); ++v) {
    if (theta(v) >= beta) {
      const auto& tag = tags[v];
      est.x += theta(v) * rps[tag.rp].x;
      est.y += theta(v) * rps[tag.rp].y;
      weight_sum += theta(v);
      est.support.push_back(SupportEntry{tag.rp, tag.orientation, theta(v)});
    }
  }
  if (est.support.empty()) {
    // No coefficient reached the threshold; fall back to the single largest.
    Eigen::Index best;
    theta.maxCoeff(&best);
    const auto& tag = tags[static_cast<std::size_t>(best)];
    est.x = rps[tag.rp].x;
    est.y = rps[tag.rp].y;
    est.low_confidence = true;
    est.support.push_back(SupportEntry{tag.rp, tag.orientation, theta(best)});
    return est;
  }
  est.x /= weight_sum;
  est.y /= weight_sum;
  return est;
}

std::vector<int> outlier_report(const SparseSolution& sol, const APSelection& sel,
                                double magnitude_floor) {
  std::vector<int> flagged;
  for (int r = 0; r < sol.kappa.size(); ++r) {
    if (std::abs(sol.kappa(r)) >= magnitude_floor) flagged.push_back(sel.selected[r]);
  }
  std::sort(flagged.begin(), flagged.end());
  return flagged;
}

PositionEstimate localize(const OnlineMeasurement& y, const TrainedModel& model, Method method,
                          const PenaltyProfile& pen, const SolverOptions& solver_options,
                          const LocalizeOptions& options) {
  if (y.rss.size() != model.config.num_aps)
    throw std::invalid_argument("localize: measurement length is not L");

  const ModifiedRadioMap roi = select_roi(y.reliability, model.clusters, model.rel, model.avg);
  if (roi.column_count() == 0) {
    std::string failed;
    for (std::size_t o = 0; o < model.clusters.size(); ++o) {
      if (!failed.empty()) failed += ", ";
      failed += std::to_string(model.config.orientations_deg[o]);
    }
    throw std::runtime_error("localize: empty ROI at orientation(s) " + failed);
  }
  if (options.trace != nullptr) {
    for (std::size_t o = 0; o < model.clusters.size(); ++o) {
      *options.trace << "orientation " << model.config.orientations_deg[o] << ": winner cluster "
                     << roi.winner_cluster[o] << " (head rp "
                     << model.clusters[o].clusters[roi.winner_cluster[o]].head + 1
                     << ", hamming " << roi.winner_distance[o] << "), included clusters [";
      for (std::size_t k = 0; k < roi.included_clusters[o].size(); ++k) {
        if (k > 0) *options.trace << ' ';
        *options.trace << roi.included_clusters[o][k];
      }
      *options.trace << "]\n";
    }
    *options.trace << "roi: " << roi.roi_rps.size() << " rps, " << roi.column_count()
                   << " columns\n";
  }

  std::vector<Eigen::VectorXd> scores;
  for (std::size_t o = 0; o < model.clusters.size(); ++o) {
    scores.push_back(
        fisher_scores(model.stab, model.avg, roi.roi_rps, static_cast<int>(o)));
  }
  const APSelection sel = select_aps(scores, options.num_aps);

  const Eigen::MatrixXd selected_map = apply_selection(sel, roi.psi);
  const Eigen::VectorXd selected_rss = apply_selection(sel, y.rss);
  const DesignSystem sys = DesignSystem::standardized(selected_map, selected_rss);
  const SparseSolution sol = estimate(method, sys, pen, solver_options);

  double beta;
  if (options.beta_absolute.has_value()) {
    beta = *options.beta_absolute;
  } else {
    const double max_positive = sol.theta.size() > 0 ? sol.theta.maxCoeff() : 0.0;
    beta = max_positive > 0.0 ? options.beta_relative * max_positive
                              : std::numeric_limits<double>::infinity();
  }

  PositionEstimate est = postprocess(sol.theta, roi.columns, model.rps, beta);
  est.method = method_name(method);
  est.outlier_aps = outlier_report(sol, sel, options.outlier_floor_db);
  est.objective = sol.objective;
  est.iterations = sol.iterations;
  est.converged = sol.converged;
  est.kkt_residual = sol.kkt_residual;
  est.residual_norm2 = sol.residual_norm2;
  est.roi_size = static_cast<int>(roi.roi_rps.size());
  est.selected_aps = sel.selected;
  return est;
}

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json cols = json::array();
  for (int j = 0; j < m.cols(); ++j) {
    json col = json::array();
    for (int i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (std::isinf(v)) {
        col.push_back(nullptr);
      } else {
        col.push_back(v);
      }
    }
    cols.push_back(std::move(col));
  }
  return cols;
}

Eigen::MatrixXd matrix_from_json(const json& cols, int rows) {
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (int i = 0; i < rows; ++i) {
      const auto& cell = cols[j][static_cast<std::size_t>(i)];
      m(i, static_cast<Eigen::Index>(j)) =
          cell.is_null() ? std::numeric_limits<double>::infinity() : cell.get<double>();
    }
  }
  return m;
}

}  // namespace

void TrainedModel::save(const std::filesystem::path& path) const {
  json doc;
  doc["config"] = json{{"num_aps", config.num_aps},
                       {"num_rps", config.num_rps},
                       {"samples_per_rp", config.samples_per_rp},
                       {"orientations", config.orientations_deg},
                       {"reliability_threshold", config.reliability_threshold},
                       {"reliability_fraction", config.reliability_fraction},
                       {"eta_fraction", config.eta_fraction},
                       {"missing_sentinel", config.missing_sentinel}};
  json rps_json = json::array();
  for (const auto& rp : rps) rps_json.push_back(json{{"id", rp.id}, {"x", rp.x}, {"y", rp.y}});
  doc["rps"] = std::move(rps_json);

  json psi = json::array(), counts = json::array(), bits = json::array();
  json per_ap = json::array(), per_rp = json::array(), clusters_json = json::array();
  for (int o = 0; o < config.num_orientations(); ++o) {
    psi.push_back(matrix_to_json(avg.psi[o]));
    counts.push_back(matrix_to_json(rel.counts[o].cast<double>()));
    bits.push_back(matrix_to_json(rel.indicators[o].cast<double>()));
    per_ap.push_back(matrix_to_json(stab.per_ap[o]));
    json rp_var = json::array();
    for (int j = 0; j < config.num_rps; ++j) {
      const double v = stab.per_rp[o](j);
      if (std::isinf(v)) {
        rp_var.push_back(nullptr);
      } else {
        rp_var.push_back(v);
      }
    }
    per_rp.push_back(std::move(rp_var));

    json cluster_list = json::array();
    for (const auto& c : clusters[o].clusters) {
      std::vector<int> ids;
      for (int j : c.members) ids.push_back(j + 1);
      cluster_list.push_back(json{{"head", c.head + 1}, {"members", ids}});
    }
    clusters_json.push_back(std::move(cluster_list));
  }
  doc["psi"] = std::move(psi);
  doc["reliability_counts"] = std::move(counts);
  doc["reliability_indicators"] = std::move(bits);
  doc["stability_per_ap"] = std::move(per_ap);
  doc["stability_per_rp"] = std::move(per_rp);
  doc["clusters"] = std::move(clusters_json);

  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << doc.dump() << '\n';
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }

  TrainedModel model;
  try {
    const auto& c = doc.at("config");
    model.config.num_aps = c.at("num_aps").get<int>();
    model.config.num_rps = c.at("num_rps").get<int>();
    model.config.samples_per_rp = c.at("samples_per_rp").get<int>();
    model.config.orientations_deg = c.at("orientations").get<std::vector<double>>();
    model.config.reliability_threshold = c.at("reliability_threshold").get<double>();
    model.config.reliability_fraction = c.at("reliability_fraction").get<double>();
    model.config.eta_fraction = c.at("eta_fraction").get<double>();
    model.config.missing_sentinel = c.at("missing_sentinel").get<double>();

    for (const auto& rp : doc.at("rps")) {
      model.rps.push_back(ReferencePoint{rp.at("id").get<int>(), rp.at("x").get<double>(),
                                         rp.at("y").get<double>()});
    }
    const int num_aps = model.config.num_aps;
    const int num_rps = model.config.num_rps;
    for (int o = 0; o < model.config.num_orientations(); ++o) {
      model.avg.psi.push_back(matrix_from_json(doc.at("psi")[o], num_aps));
      model.rel.counts.push_back(
          matrix_from_json(doc.at("reliability_counts")[o], num_aps).cast<int>());
      model.rel.indicators.push_back(
          matrix_from_json(doc.at("reliability_indicators")[o], num_aps).cast<int>());
      model.stab.per_ap.push_back(matrix_from_json(doc.at("stability_per_ap")[o], num_aps));
      Eigen::VectorXd rp_var(num_rps);
      const auto& var_json = doc.at("stability_per_rp")[o];
      for (int j = 0; j < num_rps; ++j) {
        rp_var(j) = var_json[static_cast<std::size_t>(j)].is_null()
                        ? std::numeric_limits<double>::infinity()
                        : var_json[static_cast<std::size_t>(j)].get<double>();
      }
      model.stab.per_rp.push_back(std::move(rp_var));

      ClusterSet set;
      set.orientation = o;
      for (const auto& cj : doc.at("clusters")[o]) {
        Cluster cluster;
        cluster.head = cj.at("head").get<int>() - 1;
        for (int id : cj.at("members").get<std::vector<int>>()) cluster.members.push_back(id - 1);
        set.clusters.push_back(std::move(cluster));
      }
      set.membership.assign(num_rps, {});
      for (int k = 0; k < set.cluster_count(); ++k)
        for (int j : set.clusters[k].members) set.membership[j].push_back(k);
      model.clusters.push_back(std::move(set));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return model;
}

}  // namespace sparseloc
