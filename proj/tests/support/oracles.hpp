#pragma once

#include <Eigen/Dense>
#include <cstdint>

// Independent reference solvers used to cross-check the production engines.
// Everything here follows a different algorithmic route than the code under
// test: accelerated proximal gradient instead of coordinate descent, and
// exhaustive vertex enumeration instead of operator splitting.
namespace oracle {

struct ProxResult {
  Eigen::VectorXd coef;
  double objective = 0.0;
  int iterations = 0;
};

/// Minimizes (1/n)||y - H x||^2 + sum w2 x^2 + sum w1 |x| with FISTA at a
/// fixed 1/L step, run to a tight gradient-mapping tolerance.
ProxResult proximal_gradient(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                             double tol = 1e-12, int max_iterations = 400000);

/// Optimal value of min sum w(l) |x_l| s.t. H x = y for small systems, found
/// by enumerating every candidate support of size <= rows (an optimal basic
/// solution of the equivalent linear program uses at most rows columns).
/// Returns +inf if no candidate support reproduces y.
double basis_pursuit_enumeration(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& w);

/// Deterministic dense Gaussian test matrix / vector from the library's
/// portable generator.
Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed);
Eigen::VectorXd gaussian_vector(int size, std::uint64_t seed);

}  // namespace oracle
