#include "sparseloc/ap_select.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sparseloc {

namespace {
constexpr double kDenominatorFloor = 1e-9;
}

Eigen::MatrixXd APSelection::selection_matrix() const {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(selected.size()),
                                              num_aps);
  for (std::size_t r = 0; r < selected.size(); ++r) phi(static_cast<Eigen::Index>(r), selected[r]) = 1.0;
  return phi;
}

Eigen::VectorXd fisher_scores(const RawRadioMap& raw, const AveragedRadioMap& avg,
                              const std::vector<int>& roi_rps, int orientation) {
  if (roi_rps.empty()) throw std::invalid_argument("fisher_scores: empty ROI");
  const int num_aps = raw.config.num_aps;
  const double norm = 1.0 / (raw.config.samples_per_rp - 1);
  Eigen::VectorXd scores(num_aps);
  for (int i = 0; i < num_aps; ++i) {
    double mean = 0.0;
    for (int j : roi_rps) mean += avg.psi[orientation](i, j);
    mean /= static_cast<double>(roi_rps.size());

    double spread = 0.0;
    double pooled = 0.0;
    for (int j : roi_rps) {
      const double psi = avg.psi[orientation](i, j);
      spread += (psi - mean) * (psi - mean);
      pooled += (raw.samples[orientation][j].row(i).array() - psi).square().sum() * norm;
    }
    scores(i) = spread / std::max(pooled, kDenominatorFloor);
  }
  return scores;
}

Eigen::VectorXd fisher_scores(const StabilityProfile& stab, const AveragedRadioMap& avg,
                              const std::vector<int>& roi_rps, int orientation) {
  if (roi_rps.empty()) throw std::invalid_argument("fisher_scores: empty ROI");
  const int num_aps = static_cast<int>(avg.psi[orientation].rows());
  Eigen::VectorXd scores(num_aps);
  for (int i = 0; i < num_aps; ++i) {
    double mean = 0.0;
    for (int j : roi_rps) mean += avg.psi[orientation](i, j);
    mean /= static_cast<double>(roi_rps.size());

    double spread = 0.0;
    double pooled = 0.0;
    for (int j : roi_rps) {
      const double psi = avg.psi[orientation](i, j);
      spread += (psi - mean) * (psi - mean);
      pooled += stab.per_ap[orientation](i, j);
    }
    scores(i) = spread / std::max(pooled, kDenominatorFloor);
  }
  return scores;
}

APSelection select_aps(const std::vector<Eigen::VectorXd>& per_orientation_scores,
                       int count) {
  if (per_orientation_scores.empty())
    throw std::invalid_argument("select_aps: no scores given");
  const int num_aps = static_cast<int>(per_orientation_scores[0].size());
  if (count < 1 || count > num_aps)
    throw std::invalid_argument("select_aps: selection size must be in [1, L]");

  APSelection sel;
  sel.num_aps = num_aps;
  sel.per_orientation_scores = per_orientation_scores;
  sel.averaged_scores = Eigen::VectorXd::Zero(num_aps);
  for (const auto& scores : per_orientation_scores) sel.averaged_scores += scores;
  sel.averaged_scores /= static_cast<double>(per_orientation_scores.size());

  std::vector<int> order(num_aps);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (sel.averaged_scores(a) != sel.averaged_scores(b))
      return sel.averaged_scores(a) > sel.averaged_scores(b);
    return a < b;
  });
  sel.selected.assign(order.begin(), order.begin() + count);
  return sel;
}

Eigen::VectorXd apply_selection(const APSelection& sel, const Eigen::VectorXd& v) {
  if (v.size() != sel.num_aps)
    throw std::invalid_argument("apply_selection: vector length is not L");
  Eigen::VectorXd out(static_cast<Eigen::Index>(sel.selected.size()));
  for (std::size_t r = 0; r < sel.selected.size(); ++r)
    out(static_cast<Eigen::Index>(r)) = v(sel.selected[r]);
  return out;
}

Eigen::MatrixXd apply_selection(const APSelection& sel, const Eigen::MatrixXd& m) {
  if (m.rows() != sel.num_aps)
    throw std::invalid_argument("apply_selection: matrix row count is not L");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(sel.selected.size()), m.cols());
  for (std::size_t r = 0; r < sel.selected.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(sel.selected[r]);
  return out;
}

}  // namespace sparseloc
