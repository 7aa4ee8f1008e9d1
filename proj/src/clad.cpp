#include "censee/clad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "censee/errors.hpp"
#include "censee/rng.hpp"
#include "censee/simplex.hpp"

namespace censee {

namespace {

// LP for min cost_u * sum_i |y_i - x_i beta| + sum_j cost_beta_j |beta_j| on a
// fixed row set. Columns [beta+ (p), beta- (p), u+ (n), u- (n)]; the starting
// basis takes u_i+ or u_i- per row, so no phase-1 is needed. Costs can change
// between solves (penalty path warm starts) without rebuilding the tableau.
class LadLp {
 public:
  LadLp(const Eigen::MatrixXd& X, const Eigen::VectorXd& y)
      : n_(X.rows()), p_(X.cols()) {
    Eigen::MatrixXd A(n_, 2 * p_ + 2 * n_);
    A.leftCols(p_) = X;
    A.middleCols(p_, p_) = -X;
    A.middleCols(2 * p_, n_) = Eigen::MatrixXd::Identity(n_, n_);
    A.rightCols(n_) = -Eigen::MatrixXd::Identity(n_, n_);
    std::vector<int> basis(n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      basis[i] = static_cast<int>(y[i] >= 0.0 ? 2 * p_ + i : 2 * p_ + n_ + i);
    simplex_ = std::make_unique<DenseSimplex>(A, y, costs(1.0, Eigen::VectorXd::Zero(p_)),
                                              std::move(basis));
  }

  CoefVector solve(double cost_u, const Eigen::VectorXd& cost_beta, long max_pivots,
                   bool& optimal, double* lp_objective = nullptr) {
    simplex_->set_costs(costs(cost_u, cost_beta));
    SimplexResult res = simplex_->solve(max_pivots);
    if (res.status == LpStatus::unbounded)
      throw Error("clad", "penalized LAD LP reported unbounded (internal error)");
    optimal = res.status == LpStatus::optimal;
    Eigen::VectorXd x = simplex_->primal();
    if (lp_objective) *lp_objective = res.objective;
    return CoefVector(x.head(p_) - x.segment(p_, p_));
  }

  Eigen::Index rows() const { return n_; }

 private:
  Eigen::VectorXd costs(double cost_u, const Eigen::VectorXd& cost_beta) const {
    Eigen::VectorXd c(2 * p_ + 2 * n_);
    c.head(p_) = cost_beta;
    c.segment(p_, p_) = cost_beta;
    c.segment(2 * p_, 2 * n_).setConstant(cost_u);
    return c;
  }

  Eigen::Index n_, p_;
  std::unique_ptr<DenseSimplex> simplex_;
};

Eigen::VectorXd penalty_costs(double lambda, Eigen::Index p, const std::vector<bool>& penalize) {
  Eigen::VectorXd c = Eigen::VectorXd::Constant(p, lambda);
  if (!penalize.empty()) {
    if (static_cast<Eigen::Index>(penalize.size()) != p)
      throw Error("clad", "penalize mask length does not match column count");
    for (Eigen::Index j = 0; j < p; ++j)
      if (!penalize[static_cast<size_t>(j)]) c[j] = 0.0;
  }
  return c;
}

double penalty_value(const Eigen::VectorXd& beta, double lambda,
                     const std::vector<bool>& penalize) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (penalize.empty() || penalize[static_cast<size_t>(j)]) s += std::fabs(beta[j]);
  return lambda * s;
}

// Single-entry cache so consecutive solves on the same row subset reuse the
// simplex tableau (the cross-validation path hits this constantly).
struct LpCache {
  std::vector<int> rows;
  std::unique_ptr<LadLp> lp;
};

CoefVector solve_lad_rows(const Dataset& d, const std::vector<int>& rows, double cost_u,
                          const Eigen::VectorXd& cost_beta, long max_pivots, bool& optimal,
                          LpCache* cache) {
  if (cache && cache->lp && cache->rows == rows)
    return cache->lp->solve(cost_u, cost_beta, max_pivots, optimal);
  Eigen::MatrixXd Xs(rows.size(), d.p());
  Eigen::VectorXd ys(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    Xs.row(static_cast<Eigen::Index>(r)) = d.X.row(rows[r]);
    ys[static_cast<Eigen::Index>(r)] = d.y[rows[r]];
  }
  auto lp = std::make_unique<LadLp>(Xs, ys);
  CoefVector beta = lp->solve(cost_u, cost_beta, max_pivots, optimal);
  if (cache) {
    cache->rows = rows;
    cache->lp = std::move(lp);
  }
  return beta;
}

std::vector<int> active_rows(const Dataset& d, const Eigen::VectorXd& beta) {
  Eigen::VectorXd index = d.X * beta;
  std::vector<int> rows;
  rows.reserve(static_cast<size_t>(d.n()));
  for (Eigen::Index i = 0; i < d.n(); ++i)
    if (index[i] > 0.0) rows.push_back(static_cast<int>(i));
  return rows;
}

// Iterated-LAD CLAD fit; init_active seeds A^0 (empty means all rows).
// The cache may be shared across calls with the same underlying dataset.
FitResult fit_clad_active_set(const Dataset& d, double lambda, const FitOptions& opts,
                              const std::vector<int>& init_active, LpCache* cache) {
  const double inv_n = 1.0 / static_cast<double>(d.n());
  const Eigen::VectorXd cost_beta = penalty_costs(lambda, d.p(), opts.penalize);

  FitResult out;
  out.lambda = lambda;
  out.mode = CladMode::active_set;

  std::vector<int> A = init_active;
  if (A.empty()) {
    A.resize(static_cast<size_t>(d.n()));
    std::iota(A.begin(), A.end(), 0);
  }

  double best_obj = std::numeric_limits<double>::infinity();
  CoefVector best_beta;
  bool all_optimal = true;
  for (int it = 0; it < opts.max_active_set_iter; ++it) {
    bool optimal = false;
    CoefVector beta = solve_lad_rows(d, A, inv_n, cost_beta, opts.max_pivots, optimal, cache);
    all_optimal = all_optimal && optimal;
    out.iterations = it + 1;

    double obj = clad_loss(d, beta) + penalty_value(beta.beta, lambda, opts.penalize);
    if (obj < best_obj) {
      best_obj = obj;
      best_beta = beta;
    }

    std::vector<int> next = active_rows(d, beta.beta);
    if (next.empty()) {
      out.beta_hat = CoefVector(Eigen::VectorXd::Zero(d.p()));
      out.objective = clad_loss(d, out.beta_hat) +
                      penalty_value(out.beta_hat.beta, lambda, opts.penalize);
      out.converged = false;
      out.diagnostic = "empty-active-set";
      return out;
    }
    if (next == A) {
      out.converged = all_optimal;
      if (!all_optimal) out.diagnostic = "lp-pivot-cap";
      break;
    }
    A = std::move(next);
    if (it + 1 == opts.max_active_set_iter) out.diagnostic = "active-set-iteration-cap";
  }
  out.beta_hat = best_beta;
  out.objective = best_obj;
  return out;
}

// The displayed linear program, verbatim: columns
// [beta+ (p), beta- (p), u+ (n), u- (n), v+ (n), v- (n)], constraints
//   u_i+ - u_i- + v_i+                        = y_i
//   v_i+ - v_i- - sum_j X_ij (beta_j+ - beta_j-) = 0.
// Note it under-counts |y_i - max{0, x_i beta}| whenever y_i exceeds the
// fitted part (v_i+ is free to track y_i), so it is a relaxation of CLAD.
FitResult fit_clad_paper_lp(const Dataset& d, double lambda, const FitOptions& opts) {
  const Eigen::Index n = d.n(), p = d.p();
  const Eigen::Index N = 2 * p + 4 * n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, N);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
  // family 1 rows 0..n-1, family 2 rows n..2n-1
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 2 * p + i) = 1.0;           // u+
    A(i, 2 * p + n + i) = -1.0;      // u-
    A(i, 2 * p + 2 * n + i) = 1.0;   // v+
    b[i] = d.y[i];
    A(n + i, 2 * p + 2 * n + i) = 1.0;   // v+
    A(n + i, 2 * p + 3 * n + i) = -1.0;  // v-
    A.block(n + i, 0, 1, p) = -d.X.row(i);
    A.block(n + i, p, 1, p) = d.X.row(i);
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(N);
  c.head(p) = penalty_costs(lambda, p, opts.penalize);
  c.segment(p, p) = c.head(p);
  c.segment(2 * p, 2 * n).setConstant(1.0 / static_cast<double>(n));
  std::vector<int> basis(static_cast<size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    basis[static_cast<size_t>(i)] =
        static_cast<int>(d.y[i] >= 0.0 ? 2 * p + i : 2 * p + n + i);
    basis[static_cast<size_t>(n + i)] = static_cast<int>(2 * p + 3 * n + i);  // v- at 0
  }
  DenseSimplex lp(A, b, c, std::move(basis));
  SimplexResult res = lp.solve(opts.max_pivots);
  if (res.status == LpStatus::unbounded)
    throw Error("clad", "paper LP reported unbounded (internal error)");
  Eigen::VectorXd x = lp.primal();
  FitResult out;
  out.beta_hat = CoefVector(x.head(p) - x.segment(p, p));
  out.lambda = lambda;
  out.mode = CladMode::paper_lp;
  out.iterations = 1;
  out.converged = res.status == LpStatus::optimal;
  out.objective =
      clad_loss(d, out.beta_hat) + penalty_value(out.beta_hat.beta, lambda, opts.penalize);
  out.diagnostic = "lp-relaxation-objective=" + std::to_string(res.objective);
  return out;
}

}  // namespace

CoefVector solve_penalized_lad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               double lambda, const std::vector<bool>& penalize) {
  if (X.rows() != y.size()) throw Error("clad", "solve_penalized_lad: rows of X != length of y");
  if (lambda < 0.0) throw Error("clad", "solve_penalized_lad: lambda must be >= 0");
  LadLp lp(X, y);
  bool optimal = false;
  CoefVector beta = lp.solve(1.0 / static_cast<double>(X.rows()),
                             penalty_costs(lambda, X.cols(), penalize), 100000, optimal);
  if (!optimal) throw Error("clad", "solve_penalized_lad: simplex pivot cap exceeded");
  return beta;
}

FitResult fit_clad(const Dataset& d, double lambda, const FitOptions& opts) {
  if (lambda < 0.0) throw Error("clad", "fit_clad: lambda must be >= 0");
  if (opts.mode == CladMode::paper_lp) return fit_clad_paper_lp(d, lambda, opts);
  LpCache cache;
  return fit_clad_active_set(d, lambda, opts, {}, &cache);
}

std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0xf01d5));
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  std::vector<std::vector<int>> folds(static_cast<size_t>(k));
  for (int f = 0; f < k; ++f) {
    int lo = static_cast<int>(static_cast<long>(n) * f / k);
    int hi = static_cast<int>(static_cast<long>(n) * (f + 1) / k);
    folds[static_cast<size_t>(f)].assign(order.begin() + lo, order.begin() + hi);
    std::sort(folds[static_cast<size_t>(f)].begin(), folds[static_cast<size_t>(f)].end());
  }
  return folds;
}

std::pair<double, CvCurve> cv_select_lambda(const Dataset& d, const Eigen::VectorXd& grid,
                                            int k, std::uint64_t seed, const FitOptions& opts) {
  if (grid.size() == 0) throw Error("clad", "cv_select_lambda: empty lambda grid");
  for (Eigen::Index g = 1; g < grid.size(); ++g)
    if (grid[g] >= grid[g - 1])
      throw Error("clad", "cv_select_lambda: grid must be strictly decreasing");
  if (k < 2) throw Error("clad", "cv_select_lambda: k must be >= 2");
  const int n = static_cast<int>(d.n());
  if (n < 2 * k) throw Error("clad", "cv_select_lambda: need n >= 2k");

  auto folds = make_folds(n, k, seed);
  const Eigen::Index m = grid.size();
  Eigen::MatrixXd cv(k, m);

  for (int f = 0; f < k; ++f) {
    const auto& hold = folds[static_cast<size_t>(f)];
    if (hold.empty()) throw Error("clad", "cv_select_lambda: empty fold");
    std::vector<char> is_hold(static_cast<size_t>(n), 0);
    for (int i : hold) is_hold[static_cast<size_t>(i)] = 1;
    Dataset train;
    train.censor_level = 0.0;
    train.X.resize(n - static_cast<int>(hold.size()), d.p());
    train.y.resize(train.X.rows());
    Eigen::Index r = 0;
    for (int i = 0; i < n; ++i) {
      if (is_hold[static_cast<size_t>(i)]) continue;
      train.X.row(r) = d.X.row(i);
      train.y[r] = d.y[i];
      ++r;
    }
    // Walk the grid from most to least regularized, seeding each fit with the
    // previous one's active rows; the simplex tableau is reused whenever the
    // active row set repeats.
    LpCache cache;
    std::vector<int> warm;
    for (Eigen::Index g = 0; g < m; ++g) {
      FitResult fit = opts.mode == CladMode::paper_lp
                          ? fit_clad_paper_lp(train, grid[g], opts)
                          : fit_clad_active_set(train, grid[g], opts, warm, &cache);
      warm = active_rows(train, fit.beta_hat.beta);
      double loss = 0.0;
      for (int i : hold) {
        double idx = d.X.row(i).dot(fit.beta_hat.beta.transpose());
        loss += std::fabs(d.y[i] - std::max(0.0, idx));
      }
      cv(f, g) = loss / static_cast<double>(hold.size());
    }
  }

  CvCurve curve;
  curve.grid = grid;
  curve.k_folds = k;
  curve.cv_mean = cv.colwise().mean();
  curve.cv_se.resize(m);
  for (Eigen::Index g = 0; g < m; ++g) {
    double mean = curve.cv_mean[g];
    double ss = (cv.col(g).array() - mean).square().sum();
    double sd = k > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
    curve.cv_se[g] = sd / std::sqrt(static_cast<double>(k));
  }

  // argmin with ties resolved toward larger lambda (earlier grid index)
  Eigen::Index imin = 0;
  for (Eigen::Index g = 1; g < m; ++g)
    if (curve.cv_mean[g] < curve.cv_mean[imin]) imin = g;
  const double threshold = curve.cv_mean[imin] + curve.cv_se[imin];
  Eigen::Index pick = imin;
  for (Eigen::Index g = 0; g < m; ++g) {
    if (curve.cv_mean[g] <= threshold) {
      pick = g;
      break;
    }
  }
  return {grid[pick], curve};
}

Eigen::VectorXd default_lambda_grid(const Dataset& d, const std::vector<bool>& penalize,
                                    int size, double min_ratio) {
  if (size < 1) throw Error("clad", "default_lambda_grid: size must be >= 1");
  const Eigen::Index n = d.n(), p = d.p();
  // Residuals of the first LAD subproblem restricted to the unpenalized
  // coordinates (zero fit when everything is penalized).
  Eigen::VectorXd resid = d.y;
  std::vector<Eigen::Index> free_cols;
  if (!penalize.empty())
    for (Eigen::Index j = 0; j < p; ++j)
      if (!penalize[static_cast<size_t>(j)]) free_cols.push_back(j);
  if (!free_cols.empty()) {
    Eigen::MatrixXd Xf(n, static_cast<Eigen::Index>(free_cols.size()));
    for (size_t c = 0; c < free_cols.size(); ++c) Xf.col(static_cast<Eigen::Index>(c)) = d.X.col(free_cols[c]);
    CoefVector bf = solve_penalized_lad(Xf, d.y, 0.0);
    resid = d.y - Xf * bf.beta;
  }
  // Smallest lambda certifying beta = 0: zero residuals carry free
  // subgradients in [-1,1], so their |X_ij| can cancel the fixed-sign mass.
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!penalize.empty() && !penalize[static_cast<size_t>(j)]) continue;
    double fixed = 0.0, slack = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (resid[i] > 0.0)
        fixed += d.X(i, j);
      else if (resid[i] < 0.0)
        fixed -= d.X(i, j);
      else
        slack += std::fabs(d.X(i, j));
    }
    double t = std::max(0.0, std::fabs(fixed) - slack) / static_cast<double>(n);
    lambda_max = std::max(lambda_max, t);
  }
  if (lambda_max <= 0.0) lambda_max = 1.0;

  Eigen::VectorXd grid(size);
  if (size == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double lmin = std::log(lambda_max * min_ratio), lmax = std::log(lambda_max);
  for (int g = 0; g < size; ++g)
    grid[g] = std::exp(lmax + (lmin - lmax) * static_cast<double>(g) / (size - 1));
  return grid;
}

}  // namespace censee
