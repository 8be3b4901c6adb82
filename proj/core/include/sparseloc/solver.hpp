#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

namespace sparseloc {

/// Record of the column/response transformation applied before solving, kept
/// so coefficients can be mapped back to the untransformed columns.
struct Standardization {
  Eigen::VectorXd column_shift;
  Eigen::VectorXd column_scale;
  double response_shift = 0.0;

  bool is_identity() const;
};

/// Linear system the estimators operate on. H and y are stored exactly as
/// they are solved; std_record maps solved-space coefficients back to the
/// columns the system was built from. kappa_size > 0 marks a trailing
/// identity block appended by the outlier augmentation.
struct DesignSystem {
  Eigen::MatrixXd H;
  Eigen::VectorXd y;
  Standardization std_record;
  int kappa_size = 0;

  int rows() const { return static_cast<int>(H.rows()); }
  int cols() const { return static_cast<int>(H.cols()); }
  int theta_size() const { return cols() - kappa_size; }

  /// System solved as given, identity standardization.
  static DesignSystem raw(Eigen::MatrixXd H, Eigen::VectorXd y);

  /// Centers y and the columns of H and scales each column to unit norm
  /// (columns with vanishing norm keep scale 1). Penalties then act on a
  /// common coefficient scale regardless of the dBm magnitudes.
  static DesignSystem standardized(const Eigen::MatrixXd& H, const Eigen::VectorXd& y);

  /// Maps solved-space coefficients back to the original column scale.
  Eigen::VectorXd destandardize(const Eigen::VectorXd& solved) const;
};

/// Penalty configuration. When the weight vectors are empty the engines
/// derive them from (lambda, alpha, mu): lambda*alpha / lambda*(1-alpha) on
/// the position block and mu / 0 on the outlier block.
struct PenaltyProfile {
  double lambda = 0.1;
  double alpha = 0.95;
  double mu = 0.5;
  Eigen::VectorXd l1_weights;
  Eigen::VectorXd l2_weights;
};

struct SolverOptions {
  double tolerance = 1e-7;   ///< coefficient-change and KKT target per sweep
  int max_iterations = 10000;
  double admm_penalty = 1.0; ///< rho
  double admm_primal_tolerance = 1e-8;
  double admm_dual_tolerance = 1e-8;
};

struct SparseSolution {
  Eigen::VectorXd theta;        ///< position block, original column scale
  Eigen::VectorXd theta_solved; ///< position block in solved coordinates
  Eigen::VectorXd kappa;        ///< outlier block (zeros when unaugmented)
  double objective = 0.0;       ///< solved formulation evaluated at the solution
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  double primal_residual = 0.0; ///< equality-constrained solves only
  double dual_residual = 0.0;
  double residual_norm2 = 0.0;  ///< ||y - H theta - kappa||^2 in solved coordinates
  std::vector<double> objective_history;
  std::vector<int> degenerate_columns; ///< all-zero columns pinned to zero
};

enum class Method { kCs, kLasso, kGlmnet, kMCs, kMLasso, kMGlmnet };

Method parse_method(std::string_view name);
std::string method_name(Method m);
bool is_outlier_method(Method m);

/// sign(z) * max(|z| - t, 0)
double soft_threshold(double z, double t);

/// Minimizes (1/n)||y - H theta||^2 + sum_l w2(l) theta_l^2 + sum_l w1(l)|theta_l|
/// by cyclic coordinate descent with exact one-dimensional updates.
/// Convergence requires both the largest coefficient change in a sweep and
/// the KKT subgradient violation to fall below options.tolerance.
SparseSolution solve_weighted_elastic_net(const DesignSystem& sys, const PenaltyProfile& pen,
                                          const SolverOptions& options);

/// Minimizes sum_l w1(l)|theta_l| subject to y = H theta via operator
/// splitting: alternating projection onto the affine solution set (cached
/// least-squares factorization, minimum-norm for rank-deficient H) and
/// weighted soft thresholding. Throws if y is outside the range of H.
SparseSolution solve_basis_pursuit(const DesignSystem& sys, const Eigen::VectorXd& l1_weights,
                                   const SolverOptions& options);

/// Appends an identity block to H so an additive per-row outlier vector is
/// estimated jointly: the extended penalty gives the outlier block L1 weight
/// mu and no L2 weight while the position block keeps its weights.
std::pair<DesignSystem, PenaltyProfile> augment_outliers(const DesignSystem& sys,
                                                         const PenaltyProfile& pen);

/// Dispatch facade: builds the weight vectors for the requested method,
/// augments for the outlier-aware variants, and routes to the right engine.
SparseSolution estimate(Method method, const DesignSystem& sys, const PenaltyProfile& pen,
                        const SolverOptions& options);

/// Objective of the formulation solved by the elastic-net engine, evaluated
/// at solved-space coefficients.
double elastic_net_objective(const DesignSystem& sys, const Eigen::VectorXd& l1_weights,
                             const Eigen::VectorXd& l2_weights, const Eigen::VectorXd& coef);

}  // namespace sparseloc
