#include "censee/simplex.hpp"

#include <cmath>
#include <limits>

#include "censee/errors.hpp"

namespace censee {

namespace {
constexpr double kRedTol = 1e-9;    // reduced-cost optimality tolerance
constexpr double kPivTol = 1e-9;    // smallest admissible pivot element
constexpr int kDegenLimit = 40;     // degenerate pivots before Bland's rule
}  // namespace

DenseSimplex::DenseSimplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           Eigen::VectorXd c, std::vector<int> basis)
    : m_(A.rows()), n_(A.cols()), c_(std::move(c)), basis_(std::move(basis)) {
  if (b.size() != m_ || c_.size() != n_ || static_cast<Eigen::Index>(basis_.size()) != m_)
    throw Error("lp", "simplex: inconsistent problem dimensions");
  T_.resize(m_, n_ + 1);
  T_.leftCols(n_) = A;
  T_.col(n_) = b;
  // The callers supply bases whose matrix is diagonal +-1 (one u-variable per
  // row), so forming B^{-1}[A|b] is a row scale. Guard the general case too.
  for (Eigen::Index i = 0; i < m_; ++i) {
    int v = basis_[i];
    double piv = T_(i, v);
    bool unit = true;
    for (Eigen::Index r = 0; r < m_; ++r)
      if (r != i && T_(r, v) != 0.0) { unit = false; break; }
    if (!unit || std::fabs(piv) < kPivTol)
      throw Error("lp", "simplex: starting basis is not row-diagonal");
    if (piv != 1.0) T_.row(i) /= piv;
    if (T_(i, n_) < 0.0)
      throw Error("lp", "simplex: starting basis is infeasible");
  }
  reprice();
}

void DenseSimplex::set_costs(Eigen::VectorXd c) {
  if (c.size() != n_) throw Error("lp", "simplex: cost vector size mismatch");
  c_ = std::move(c);
  reprice();
}

void DenseSimplex::reprice() {
  Eigen::RowVectorXd cb(m_);
  for (Eigen::Index i = 0; i < m_; ++i) cb[i] = c_[basis_[i]];
  red_ = c_.transpose() - cb * T_.leftCols(n_);
  for (int v : basis_) red_[v] = 0.0;  // clear roundoff on basic columns
}

void DenseSimplex::pivot(int row, int col) {
  T_.row(row) /= T_(row, col);
  Eigen::VectorXd colv = T_.col(col);
  colv[row] = 0.0;
  T_.noalias() -= colv * T_.row(row);
  const double rc = red_[col];
  red_ -= rc * T_.row(row);
  T_.col(col).setZero();
  T_(row, col) = 1.0;
  red_[col] = 0.0;
  basis_[row] = col;
}

SimplexResult DenseSimplex::solve(long max_pivots) {
  SimplexResult res;
  int degen_run = 0;
  while (res.pivots < max_pivots) {
    // Entering variable.
    int enter = -1;
    if (degen_run < kDegenLimit) {
      double best = -kRedTol;
      for (Eigen::Index j = 0; j < n_; ++j)
        if (red_[j] < best) { best = red_[j]; enter = static_cast<int>(j); }
    } else {
      for (Eigen::Index j = 0; j < n_; ++j)
        if (red_[j] < -kRedTol) { enter = static_cast<int>(j); break; }
    }
    if (enter < 0) {
      res.status = LpStatus::optimal;
      break;
    }
    // Ratio test; ties go to the smallest basic variable index (keeps the
    // Bland fallback anti-cycling and the whole walk deterministic).
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m_; ++i) {
      double a = T_(i, enter);
      if (a <= kPivTol) continue;
      double ratio = T_(i, n_) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && (leave < 0 || basis_[i] < basis_[leave]))) {
        best_ratio = ratio;
        leave = static_cast<int>(i);
      }
    }
    if (leave < 0) {
      res.status = LpStatus::unbounded;
      break;
    }
    degen_run = best_ratio <= 1e-12 ? degen_run + 1 : 0;
    pivot(leave, enter);
    ++res.pivots;
  }
  if (res.pivots >= max_pivots) res.status = LpStatus::iteration_limit;
  total_pivots_ += res.pivots;
  res.objective = objective();
  return res;
}

Eigen::VectorXd DenseSimplex::primal() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
  for (Eigen::Index i = 0; i < m_; ++i) x[basis_[i]] = T_(i, n_);
  return x;
}

double DenseSimplex::objective() const {
  double obj = 0.0;
  for (Eigen::Index i = 0; i < m_; ++i) obj += c_[basis_[i]] * T_(i, n_);
  return obj;
}

}  // namespace censee
