#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "censee/model.hpp"

namespace censee {

enum class CladMode { active_set, paper_lp };

struct FitResult {
  CoefVector beta_hat;
  double lambda = 0.0;
  double objective = 0.0;  // clad_loss(d, beta_hat) + lambda * ||beta_hat||_1
  int iterations = 0;
  bool converged = false;
  CladMode mode = CladMode::active_set;
  std::string diagnostic;
};

struct CvCurve {
  Eigen::VectorXd grid;     // strictly decreasing
  Eigen::VectorXd cv_mean;
  Eigen::VectorXd cv_se;
  int k_folds = 0;
};

struct FitOptions {
  CladMode mode = CladMode::active_set;
  // penalize[j] == false exempts coordinate j from the l1 penalty (used for
  // the simulation intercept). Empty means penalize everything.
  std::vector<bool> penalize;
  int max_active_set_iter = 50;
  long max_pivots = 100000;
};

// Exact LP solve of min n^{-1} sum_i |y_i - x_i beta| + lambda * sum_{j in
// penalize} |beta_j| (beta split into beta+ - beta-, residuals into u+ - u-).
CoefVector solve_penalized_lad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               double lambda, const std::vector<bool>& penalize = {});

// Penalized CLAD initial estimator on a zero-censored dataset.
FitResult fit_clad(const Dataset& d, double lambda, const FitOptions& opts = {});

// K-fold cross-validation with the one-standard-deviation rule; returns the
// largest grid lambda whose mean CV loss is within one SE of the minimum.
std::pair<double, CvCurve> cv_select_lambda(const Dataset& d, const Eigen::VectorXd& grid,
                                            int k, std::uint64_t seed,
                                            const FitOptions& opts = {});

// 50 log-spaced values from lambda_max (all-zero threshold of the first LAD
// subproblem) down to 0.01 * lambda_max.
Eigen::VectorXd default_lambda_grid(const Dataset& d, const std::vector<bool>& penalize = {},
                                    int size = 50, double min_ratio = 0.01);

// Seeded K-fold partition of {0..n-1}; fold f is folds[f]. Shared by the CLAD
// and nodewise cross-validation routines.
std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed);

}  // namespace censee
