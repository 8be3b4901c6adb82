#include "sparseloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparseloc {

namespace {

constexpr double kZeroColumnNorm = 1e-12;

Eigen::VectorXd theta_l1_weights(const PenaltyProfile& pen, int theta_size) {
  return Eigen::VectorXd::Constant(theta_size, pen.lambda * pen.alpha);
}

Eigen::VectorXd theta_l2_weights(const PenaltyProfile& pen, int theta_size) {
  return Eigen::VectorXd::Constant(theta_size, pen.lambda * (1.0 - pen.alpha));
}

// Materializes the penalty weights for a system, deriving the elastic-net
// convention from (lambda, alpha, mu) when no explicit vectors are given.
void resolve_weights(const DesignSystem& sys, const PenaltyProfile& pen,
                     Eigen::VectorXd& w1, Eigen::VectorXd& w2) {
  const int p = sys.cols();
  if (pen.l1_weights.size() == 0) {
    w1.resize(p);
    w1.head(sys.theta_size()) = theta_l1_weights(pen, sys.theta_size());
    if (sys.kappa_size > 0) w1.tail(sys.kappa_size).setConstant(pen.mu);
  } else if (pen.l1_weights.size() == p) {
    w1 = pen.l1_weights;
  } else {
    throw std::invalid_argument("PenaltyProfile: l1 weight count disagrees with columns");
  }
  if (pen.l2_weights.size() == 0) {
    w2.resize(p);
    w2.head(sys.theta_size()) = theta_l2_weights(pen, sys.theta_size());
    if (sys.kappa_size > 0) w2.tail(sys.kappa_size).setZero();
  } else if (pen.l2_weights.size() == p) {
    w2 = pen.l2_weights;
  } else {
    throw std::invalid_argument("PenaltyProfile: l2 weight count disagrees with columns");
  }
  if ((w1.array() < 0.0).any() || (w2.array() < 0.0).any())
    throw std::invalid_argument("PenaltyProfile: weights must be non-negative");
}

void split_solution(const DesignSystem& sys, const Eigen::VectorXd& solved,
                    SparseSolution& sol) {
  const Eigen::VectorXd original = sys.destandardize(solved);
  sol.theta = original.head(sys.theta_size());
  sol.theta_solved = solved.head(sys.theta_size());
  sol.kappa = sys.kappa_size > 0 ? original.tail(sys.kappa_size).eval()
                                 : Eigen::VectorXd::Zero(sys.rows()).eval();
  sol.residual_norm2 = (sys.y - sys.H * solved).squaredNorm();
}

// Largest violation of the subgradient stationarity conditions of the
// weighted elastic net at `coef`, given the residual r = y - H coef.
double elastic_net_kkt(const Eigen::MatrixXd& H, const Eigen::VectorXd& residual,
                       const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                       const Eigen::VectorXd& coef) {
  const double inv_n = 1.0 / static_cast<double>(H.rows());
  const Eigen::VectorXd grad = 2.0 * inv_n * (H.transpose() * residual);
  double worst = 0.0;
  for (int l = 0; l < coef.size(); ++l) {
    double violation;
    if (coef(l) == 0.0) {
      violation = std::max(0.0, std::abs(grad(l)) - w1(l));
    } else {
      const double sign = coef(l) > 0.0 ? 1.0 : -1.0;
      violation = std::abs(grad(l) - 2.0 * w2(l) * coef(l) - w1(l) * sign);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace

bool Standardization::is_identity() const {
  return response_shift == 0.0 && (column_shift.size() == 0 || column_shift.isZero(0.0)) &&
         (column_scale.size() == 0 || (column_scale.array() == 1.0).all());
}

DesignSystem DesignSystem::raw(Eigen::MatrixXd H, Eigen::VectorXd y) {
  if (H.rows() != y.size())
    throw std::invalid_argument("DesignSystem: H and y disagree on row count");
  if (H.rows() < 1 || H.cols() < 1) throw std::invalid_argument("DesignSystem: empty system");
  DesignSystem sys;
  sys.std_record.column_shift = Eigen::VectorXd::Zero(H.cols());
  sys.std_record.column_scale = Eigen::VectorXd::Ones(H.cols());
  sys.H = std::move(H);
  sys.y = std::move(y);
  return sys;
}

DesignSystem DesignSystem::standardized(const Eigen::MatrixXd& H, const Eigen::VectorXd& y) {
  DesignSystem sys = raw(H, y);
  sys.std_record.response_shift = y.mean();
  sys.y.array() -= sys.std_record.response_shift;
  for (int l = 0; l < H.cols(); ++l) {
    const double shift = H.col(l).mean();
    sys.H.col(l).array() -= shift;
    double scale = sys.H.col(l).norm();
    if (scale < kZeroColumnNorm) scale = 1.0;
    sys.H.col(l) /= scale;
    sys.std_record.column_shift(l) = shift;
    sys.std_record.column_scale(l) = scale;
  }
  return sys;
}

Eigen::VectorXd DesignSystem::destandardize(const Eigen::VectorXd& solved) const {
  return solved.array() / std_record.column_scale.array();
}

Method parse_method(std::string_view name) {
  if (name == "cs") return Method::kCs;
  if (name == "lasso") return Method::kLasso;
  if (name == "glmnet") return Method::kGlmnet;
  if (name == "m-cs") return Method::kMCs;
  if (name == "m-lasso") return Method::kMLasso;
  if (name == "m-glmnet") return Method::kMGlmnet;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kCs: return "cs";
    case Method::kLasso: return "lasso";
    case Method::kGlmnet: return "glmnet";
    case Method::kMCs: return "m-cs";
    case Method::kMLasso: return "m-lasso";
    case Method::kMGlmnet: return "m-glmnet";
  }
  return "?";
}

bool is_outlier_method(Method m) {
  return m == Method::kMCs || m == Method::kMLasso || m == Method::kMGlmnet;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double elastic_net_objective(const DesignSystem& sys, const Eigen::VectorXd& l1_weights,
                             const Eigen::VectorXd& l2_weights, const Eigen::VectorXd& coef) {
  const double inv_n = 1.0 / static_cast<double>(sys.rows());
  const double fit = inv_n * (sys.y - sys.H * coef).squaredNorm();
  const double ridge = (l2_weights.array() * coef.array().square()).sum();
  const double l1 = (l1_weights.array() * coef.array().abs()).sum();
  return fit + ridge + l1;
}

SparseSolution solve_weighted_elastic_net(const DesignSystem& sys, const PenaltyProfile& pen,
                                          const SolverOptions& options) {
  if (options.tolerance <= 0.0 || options.max_iterations < 1)
    throw std::invalid_argument("SolverOptions: tolerance > 0 and max_iterations >= 1 required");
  Eigen::VectorXd w1, w2;
  resolve_weights(sys, pen, w1, w2);

  const int n = sys.rows();
  const int p = sys.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  SparseSolution sol;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = sys.y;

  Eigen::VectorXd col_sq(p); // (2/n) ||h_l||^2
  Eigen::VectorXd denom(p);
  std::vector<bool> degenerate(p, false);
  for (int l = 0; l < p; ++l) {
    col_sq(l) = 2.0 * inv_n * sys.H.col(l).squaredNorm();
    denom(l) = col_sq(l) + 2.0 * w2(l);
    if (denom(l) <= 0.0) {
      degenerate[l] = true;
      sol.degenerate_columns.push_back(l);
    }
  }

  int sweeps = 0;
  while (sweeps < options.max_iterations) {
    ++sweeps;
    double max_delta = 0.0;
    for (int l = 0; l < p; ++l) {
      if (degenerate[l]) continue;
      // z = (2/n) h_l' r_(-l), the gradient of the fit at theta_l = 0 with
      // the other coordinates held fixed.
      const double z = 2.0 * inv_n * sys.H.col(l).dot(residual) + col_sq(l) * coef(l);
      const double updated = soft_threshold(z, w1(l)) / denom(l);
      if (updated != coef(l)) {
        residual += sys.H.col(l) * (coef(l) - updated);
        max_delta = std::max(max_delta, std::abs(updated - coef(l)));
        coef(l) = updated;
      }
    }
    sol.objective_history.push_back(inv_n * residual.squaredNorm() +
                                    (w2.array() * coef.array().square()).sum() +
                                    (w1.array() * coef.array().abs()).sum());
    if (max_delta < options.tolerance) {
      // Coefficient stagnation alone can leave a stale subgradient; only
      // declare convergence once the certificate itself is within tolerance.
      // The residual is recomputed to shed incremental-update drift.
      residual = sys.y - sys.H * coef;
      const double kkt = elastic_net_kkt(sys.H, residual, w1, w2, coef);
      if (kkt <= options.tolerance) {
        sol.converged = true;
        sol.kkt_residual = kkt;
        break;
      }
    }
  }
  sol.iterations = sweeps;
  if (!sol.converged) sol.kkt_residual = elastic_net_kkt(sys.H, sys.y - sys.H * coef, w1, w2, coef);
  sol.objective = elastic_net_objective(sys, w1, w2, coef);
  split_solution(sys, coef, sol);
  return sol;
}

SparseSolution solve_basis_pursuit(const DesignSystem& sys, const Eigen::VectorXd& l1_weights,
                                   const SolverOptions& options) {
  const int p = sys.cols();
  Eigen::VectorXd w = l1_weights;
  if (w.size() == 0) w = Eigen::VectorXd::Ones(p);
  if (w.size() != p)
    throw std::invalid_argument("solve_basis_pursuit: weight count disagrees with columns");
  if ((w.array() < 0.0).any())
    throw std::invalid_argument("solve_basis_pursuit: weights must be non-negative");

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.H);
  const Eigen::VectorXd least_squares = cod.solve(sys.y);
  const double feas_gap = (sys.H * least_squares - sys.y).lpNorm<Eigen::Infinity>();
  if (feas_gap > 1e-6 * (1.0 + sys.y.lpNorm<Eigen::Infinity>()))
    throw std::runtime_error("solve_basis_pursuit: y is outside the range of H");

  const auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - cod.solve(sys.H * v - sys.y);
  };

  double rho = options.admm_penalty;
  Eigen::VectorXd x = least_squares;
  Eigen::VectorXd z = x;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);

  SparseSolution sol;
  const double sqrt_p = std::sqrt(static_cast<double>(p));
  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    x = project(z - u);
    const Eigen::VectorXd z_prev = z;
    const Eigen::VectorXd v = x + u;
    for (int l = 0; l < p; ++l) z(l) = soft_threshold(v(l), w(l) / rho);
    u += x - z;

    const double r_norm = (x - z).norm();
    const double s_norm = rho * (z - z_prev).norm();
    const double eps_pri = options.admm_primal_tolerance *
                           (sqrt_p + std::max(x.norm(), z.norm()));
    const double eps_dual = options.admm_dual_tolerance * (sqrt_p + rho * u.norm());
    sol.primal_residual = r_norm;
    sol.dual_residual = s_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      sol.converged = true;
      break;
    }
    // Residual balancing, frozen after the warm-up phase: adapting every
    // iteration can settle into a limit cycle instead of converging.
    if (iter <= 100) {
      if (r_norm > 10.0 * s_norm) {
        rho *= 2.0;
        u /= 2.0;
      } else if (s_norm > 10.0 * r_norm) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }
  sol.iterations = iter;

  // Final projection returns a point that satisfies the constraint to
  // factorization accuracy while staying next to the sparse iterate.
  const Eigen::VectorXd coef = project(z);
  sol.kkt_residual = sol.primal_residual;
  sol.objective = (w.array() * coef.array().abs()).sum();
  split_solution(sys, coef, sol);
  return sol;
}

std::pair<DesignSystem, PenaltyProfile> augment_outliers(const DesignSystem& sys,
                                                         const PenaltyProfile& pen) {
  if (pen.mu < 0.0) throw std::invalid_argument("augment_outliers: mu must be >= 0");
  if (sys.kappa_size != 0)
    throw std::invalid_argument("augment_outliers: system already augmented");
  const int n = sys.rows();
  const int p = sys.cols();

  DesignSystem aug;
  aug.H.resize(n, p + n);
  aug.H.leftCols(p) = sys.H;
  aug.H.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
  aug.y = sys.y;
  aug.kappa_size = n;
  aug.std_record.response_shift = sys.std_record.response_shift;
  aug.std_record.column_shift = Eigen::VectorXd::Zero(p + n);
  aug.std_record.column_shift.head(p) = sys.std_record.column_shift;
  aug.std_record.column_scale = Eigen::VectorXd::Ones(p + n);
  aug.std_record.column_scale.head(p) = sys.std_record.column_scale;

  PenaltyProfile extended = pen;
  Eigen::VectorXd w1 = pen.l1_weights.size() == p ? pen.l1_weights
                                                  : theta_l1_weights(pen, p).eval();
  Eigen::VectorXd w2 = pen.l2_weights.size() == p ? pen.l2_weights
                                                  : theta_l2_weights(pen, p).eval();
  extended.l1_weights.resize(p + n);
  extended.l1_weights.head(p) = w1;
  extended.l1_weights.tail(n).setConstant(pen.mu);
  extended.l2_weights.resize(p + n);
  extended.l2_weights.head(p) = w2;
  extended.l2_weights.tail(n).setZero();
  return {std::move(aug), std::move(extended)};
}

SparseSolution estimate(Method method, const DesignSystem& sys, const PenaltyProfile& pen,
                        const SolverOptions& options) {
  if (pen.lambda < 0.0) throw std::invalid_argument("estimate: lambda must be >= 0");
  if (pen.alpha < 0.0 || pen.alpha > 1.0)
    throw std::invalid_argument("estimate: alpha must be in [0, 1]");
  if (pen.mu < 0.0) throw std::invalid_argument("estimate: mu must be >= 0");

  switch (method) {
    case Method::kCs: {
      return solve_basis_pursuit(sys, Eigen::VectorXd::Ones(sys.cols()), options);
    }
    case Method::kLasso: {
      PenaltyProfile p = pen;
      p.l1_weights = Eigen::VectorXd::Constant(sys.cols(), pen.lambda);
      p.l2_weights = Eigen::VectorXd::Zero(sys.cols());
      return solve_weighted_elastic_net(sys, p, options);
    }
    case Method::kGlmnet: {
      PenaltyProfile p = pen;
      p.l1_weights = Eigen::VectorXd::Constant(sys.cols(), pen.lambda * pen.alpha);
      p.l2_weights = Eigen::VectorXd::Constant(sys.cols(), pen.lambda * (1.0 - pen.alpha));
      return solve_weighted_elastic_net(sys, p, options);
    }
    case Method::kMCs: {
      PenaltyProfile p = pen;
      p.l1_weights = Eigen::VectorXd::Ones(sys.cols());
      p.l2_weights = Eigen::VectorXd::Zero(sys.cols());
      auto [aug, extended] = augment_outliers(sys, p);
      return solve_basis_pursuit(aug, extended.l1_weights, options);
    }
    case Method::kMLasso: {
      PenaltyProfile p = pen;
      p.l1_weights = Eigen::VectorXd::Constant(sys.cols(), pen.lambda);
      p.l2_weights = Eigen::VectorXd::Zero(sys.cols());
      auto [aug, extended] = augment_outliers(sys, p);
      return solve_weighted_elastic_net(aug, extended, options);
    }
    case Method::kMGlmnet: {
      PenaltyProfile p = pen;
      p.l1_weights = Eigen::VectorXd::Constant(sys.cols(), pen.lambda * pen.alpha);
      p.l2_weights = Eigen::VectorXd::Constant(sys.cols(), pen.lambda * (1.0 - pen.alpha));
      auto [aug, extended] = augment_outliers(sys, p);
      return solve_weighted_elastic_net(aug, extended, options);
    }
  }
  throw std::logic_error("estimate: unreachable");
}

}  // namespace sparseloc
