#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "censee/model.hpp"

namespace censee {

struct LassoOptions {
  double tol = 1e-9;        // max coordinate change per sweep
  int max_sweeps = 10000;
  double kkt_tol = 1e-6;
};

struct LassoResult {
  Eigen::VectorXd gamma;
  double kkt_gap = 0.0;
  int sweeps = 0;
  bool converged = false;
};

// Cyclic coordinate descent for min n^{-1} ||response - design g||_2^2
// + 2 lambda ||g||_1. warm (if sized) seeds the iterate.
LassoResult lasso_cd(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                     double lambda, const LassoOptions& opts = {},
                     const Eigen::VectorXd* warm = nullptr);

struct NodewiseFit {
  int j = 0;
  Eigen::VectorXd gamma_hat;  // length p-1
  double tau_sq = 0.0;        // n^{-1}||zeta||^2 + lambda_j ||gamma||_1
  double lambda_j = 0.0;
  double kkt_gap = 0.0;
};

// Lasso regression of W_j on W_{-j} with the bias-corrected scale.
NodewiseFit nodewise_fit(const ActiveWeights& W, int j, double lambda_j);

struct PrecisionEstimate {
  Eigen::MatrixXd omega;    // rows Omega_j
  Eigen::VectorXd tau_sq;
  Eigen::VectorXd lambdas;
  bool weighted = false;
  double max_kkt_gap = 0.0;
};

// Row-by-row assembly of Omega(beta_hat): Omega_jj = 1/tau_j^2,
// Omega_{j,-j} = -gamma_(j)/tau_j^2.
PrecisionEstimate build_precision(const ActiveWeights& W, const Eigen::VectorXd& lambdas,
                                  int threads = 1);

// Weighted variant on W~ = Q^{1/2} W with Q = diag(q o d).
PrecisionEstimate robust_build_precision(const ActiveWeights& W, const Eigen::VectorXd& q,
                                         const Eigen::VectorXd& dvec,
                                         const Eigen::VectorXd& lambdas, int threads = 1);

// One-standard-deviation CV for the node-j penalty (squared-error fold loss).
double cv_select_lambda_j(const ActiveWeights& W, int j, const Eigen::VectorXd& grid, int k,
                          std::uint64_t seed);

// Log-spaced grid from the node's full-shrinkage threshold.
Eigen::VectorXd default_nodewise_grid(const ActiveWeights& W, int j, int size = 50,
                                      double min_ratio = 0.01);

namespace detail {
// Shared by build_precision and cv_select_lambda_j once W has been row-scaled.
NodewiseFit nodewise_fit_matrix(const Eigen::MatrixXd& W, int j, double lambda_j);
}  // namespace detail

}  // namespace censee
