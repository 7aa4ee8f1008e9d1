#pragma once

#include <Eigen/Dense>
#include <vector>

namespace censee {

// Observed sample for the left-censored (Tobit-I) linear model
// y_i = max{censor_level, x_i beta + eps_i}. Immutable after construction;
// every estimator works on the zero-censored form (censor_level == 0).
struct Dataset {
  Eigen::MatrixXd X;          // n x p design, rows x_i
  Eigen::VectorXd y;          // observed responses, y_i >= censor_level
  double censor_level = 0.0;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  // Enforces the type invariants; throws Error("model", ...) on violation.
  void validate() const;
};

// Coefficient vector with its support tracked alongside.
struct CoefVector {
  Eigen::VectorXd beta;
  std::vector<int> support;  // exactly {j : beta_j != 0}

  CoefVector() = default;
  explicit CoefVector(Eigen::VectorXd b);

  int nnz() const { return static_cast<int>(support.size()); }
};

// W(beta) = A(beta) X with A = diag(1{X beta > 0}); row i is x_i when the
// fitted index is strictly positive and zero otherwise.
struct ActiveWeights {
  Eigen::MatrixXd W;
  std::vector<bool> indicator;
  int n_active = 0;

  Eigen::Index n() const { return W.rows(); }
  Eigen::Index p() const { return W.cols(); }
};

// Shift to the zero-censored model: y' = y - c, censor_level' = 0.
Dataset zero_censor_transform(const Dataset& d);

ActiveWeights active_weights(const Eigen::MatrixXd& X, const CoefVector& beta);

// n^{-1} sum_i |y_i - max{0, x_i beta}|
double clad_loss(const Dataset& d, const CoefVector& beta);

// Psi(beta) = n^{-1} sum_i sign(y_i - max{0, x_i beta}) w_i(beta)^T,
// with sign(0) := 0.
Eigen::VectorXd score_psi(const Dataset& d, const CoefVector& beta);

// Gram plug-in Sigma_hat(beta) = n^{-1} W^T W (symmetric PSD).
Eigen::MatrixXd sigma_hat(const ActiveWeights& w);

}  // namespace censee
