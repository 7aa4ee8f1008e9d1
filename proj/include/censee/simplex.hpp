#pragma once

#include <Eigen/Dense>
#include <vector>

namespace censee {

enum class LpStatus { optimal, iteration_limit, unbounded };

struct SimplexResult {
  LpStatus status = LpStatus::optimal;
  double objective = 0.0;
  long pivots = 0;
};

// Dense tableau simplex for min c'x s.t. Ax = b, x >= 0, started from a
// caller-supplied feasible basis. Pricing is Dantzig (most negative reduced
// cost); after a run of degenerate pivots it falls back to Bland's rule,
// which guarantees termination. Costs may be swapped without losing the
// basis, so solves can be warm-started along a penalty path.
class DenseSimplex {
 public:
  DenseSimplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
               Eigen::VectorXd c, std::vector<int> basis);

  // Replace the cost vector and re-price against the current basis.
  void set_costs(Eigen::VectorXd c);

  SimplexResult solve(long max_pivots = 100000);

  // Primal solution for the current basis.
  Eigen::VectorXd primal() const;

  double objective() const;
  const std::vector<int>& basis() const { return basis_; }

 private:
  void reprice();
  void pivot(int row, int col);

  Eigen::Index m_, n_;
  Eigen::MatrixXd T_;        // m x (n+1): [B^{-1}A | B^{-1}b]
  Eigen::RowVectorXd red_;   // reduced costs, length n
  Eigen::VectorXd c_;
  std::vector<int> basis_;   // basis_[i] = variable basic in row i
  long total_pivots_ = 0;
};

}  // namespace censee
