#include "censee/nodewise.hpp"

#include <cmath>

#include "censee/clad.hpp"  // make_folds
#include "censee/errors.hpp"
#include "censee/threading.hpp"

namespace censee {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// KKT gap for the objective n^{-1}||y - D g||^2 + 2 lambda ||g||_1:
// gradient coordinate is -2 n^{-1} d_k' r.
double kkt_gap_of(const Eigen::MatrixXd& D, const Eigen::VectorXd& r,
                  const Eigen::VectorXd& g, double lambda, double inv_n) {
  Eigen::VectorXd grad = 2.0 * inv_n * (D.transpose() * r);
  double gap = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    double v;
    if (g[k] == 0.0)
      v = std::max(0.0, std::fabs(grad[k]) - 2.0 * lambda);
    else
      v = std::fabs(grad[k] - 2.0 * lambda * (g[k] > 0.0 ? 1.0 : -1.0));
    gap = std::max(gap, v);
  }
  return gap;
}

}  // namespace

LassoResult lasso_cd(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                     double lambda, const LassoOptions& opts, const Eigen::VectorXd* warm) {
  if (design.rows() != response.size())
    throw Error("nodewise", "lasso_cd: dimension mismatch");
  if (lambda < 0.0) throw Error("nodewise", "lasso_cd: lambda must be >= 0");
  const Eigen::Index n = design.rows(), p = design.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd col_ms(p);  // n^{-1} ||d_k||^2
  for (Eigen::Index k = 0; k < p; ++k) col_ms[k] = design.col(k).squaredNorm() * inv_n;

  LassoResult out;
  out.gamma = (warm && warm->size() == p) ? *warm : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = response - design * out.gamma;

  auto sweep = [&](bool active_only) {
    double max_delta = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (col_ms[k] <= 0.0) continue;
      double g = out.gamma[k];
      if (active_only && g == 0.0) continue;
      double rho = inv_n * design.col(k).dot(r) + col_ms[k] * g;
      double gnew = soft_threshold(rho, lambda) / col_ms[k];
      if (gnew != g) {
        r += design.col(k) * (g - gnew);
        out.gamma[k] = gnew;
        max_delta = std::max(max_delta, std::fabs(gnew - g));
      }
    }
    return max_delta;
  };

  // Full sweep, then iterate the active set, re-checking all coordinates
  // before declaring convergence (and certifying the KKT gap).
  int sweeps = 0;
  while (sweeps < opts.max_sweeps) {
    double delta = sweep(false);
    ++sweeps;
    while (sweeps < opts.max_sweeps && delta >= opts.tol) {
      delta = sweep(true);
      ++sweeps;
    }
    double full_delta = sweep(false);
    ++sweeps;
    if (full_delta < opts.tol) {
      out.kkt_gap = kkt_gap_of(design, r, out.gamma, lambda, inv_n);
      if (out.kkt_gap <= opts.kkt_tol) {
        out.converged = true;
        break;
      }
    }
  }
  out.sweeps = sweeps;
  if (!out.converged) out.kkt_gap = kkt_gap_of(design, r, out.gamma, lambda, inv_n);
  return out;
}

namespace detail {

NodewiseFit nodewise_fit_matrix(const Eigen::MatrixXd& W, int j, double lambda_j) {
  const Eigen::Index n = W.rows(), p = W.cols();
  if (j < 0 || j >= p) throw Error("nodewise", "nodewise_fit: column index out of range");
  Eigen::MatrixXd D(n, p - 1);
  if (j > 0) D.leftCols(j) = W.leftCols(j);
  if (j + 1 < p) D.rightCols(p - 1 - j) = W.rightCols(p - 1 - j);
  Eigen::VectorXd response = W.col(j);

  LassoResult lr = lasso_cd(D, response, lambda_j);
  Eigen::VectorXd zeta = response - D * lr.gamma;
  NodewiseFit fit;
  fit.j = j;
  fit.gamma_hat = lr.gamma;
  fit.lambda_j = lambda_j;
  fit.kkt_gap = lr.kkt_gap;
  fit.tau_sq = zeta.squaredNorm() / static_cast<double>(n) +
               lambda_j * lr.gamma.lpNorm<1>();
  if (fit.tau_sq <= 1e-12)
    throw Error("nodewise", "degenerate scale tau^2 at node " + std::to_string(j) +
                                " (column nearly never active)");
  return fit;
}

}  // namespace detail

NodewiseFit nodewise_fit(const ActiveWeights& W, int j, double lambda_j) {
  return detail::nodewise_fit_matrix(W.W, j, lambda_j);
}

namespace {

PrecisionEstimate build_from_matrix(const Eigen::MatrixXd& W, const Eigen::VectorXd& lambdas,
                                    bool weighted, int threads) {
  const Eigen::Index p = W.cols();
  if (lambdas.size() != p)
    throw Error("nodewise", "build_precision: one lambda per column required");
  for (Eigen::Index j = 0; j < p; ++j)
    if (lambdas[j] < 0.0) throw Error("nodewise", "build_precision: lambdas must be >= 0");

  PrecisionEstimate est;
  est.omega = Eigen::MatrixXd::Zero(p, p);
  est.tau_sq.resize(p);
  est.lambdas = lambdas;
  est.weighted = weighted;

  std::vector<double> gaps(static_cast<size_t>(p), 0.0);
  std::exception_ptr first_error;
  std::mutex err_mx;
  parallel_for(static_cast<int>(p), threads, [&](int j) {
    try {
      NodewiseFit fit = detail::nodewise_fit_matrix(W, j, lambdas[j]);
      est.tau_sq[j] = fit.tau_sq;
      gaps[static_cast<size_t>(j)] = fit.kkt_gap;
      const double inv_tau = 1.0 / fit.tau_sq;
      est.omega(j, j) = inv_tau;
      Eigen::Index col = 0;
      for (Eigen::Index l = 0; l < p; ++l) {
        if (l == j) continue;
        est.omega(j, l) = -inv_tau * fit.gamma_hat[col++];
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mx);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);
  for (double g : gaps) est.max_kkt_gap = std::max(est.max_kkt_gap, g);
  return est;
}

}  // namespace

PrecisionEstimate build_precision(const ActiveWeights& W, const Eigen::VectorXd& lambdas,
                                  int threads) {
  return build_from_matrix(W.W, lambdas, false, threads);
}

PrecisionEstimate robust_build_precision(const ActiveWeights& W, const Eigen::VectorXd& q,
                                         const Eigen::VectorXd& dvec,
                                         const Eigen::VectorXd& lambdas, int threads) {
  const Eigen::Index n = W.n();
  if (q.size() != n || dvec.size() != n)
    throw Error("nodewise", "robust_build_precision: weight vectors must have length n");
  Eigen::MatrixXd Wt(n, W.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    double qd = q[i] * dvec[i];
    if (qd < 0.0)
      throw Error("nodewise", "invalid weights: q_i * d_i < 0 at row " + std::to_string(i));
    Wt.row(i) = std::sqrt(qd) * W.W.row(i);
  }
  PrecisionEstimate est = build_from_matrix(Wt, lambdas, true, threads);
  return est;
}

double cv_select_lambda_j(const ActiveWeights& W, int j, const Eigen::VectorXd& grid, int k,
                          std::uint64_t seed) {
  if (grid.size() == 0) throw Error("nodewise", "cv_select_lambda_j: empty grid");
  for (Eigen::Index g = 1; g < grid.size(); ++g)
    if (grid[g] >= grid[g - 1])
      throw Error("nodewise", "cv_select_lambda_j: grid must be strictly decreasing");
  if (k < 2) throw Error("nodewise", "cv_select_lambda_j: k must be >= 2");
  const int n = static_cast<int>(W.n());
  if (n < 2 * k) throw Error("nodewise", "cv_select_lambda_j: need n >= 2k");
  const Eigen::Index p = W.p();
  if (j < 0 || j >= p) throw Error("nodewise", "cv_select_lambda_j: bad column index");

  auto folds = make_folds(n, k, seed);
  const Eigen::Index m = grid.size();
  Eigen::MatrixXd cv(k, m);

  for (int f = 0; f < k; ++f) {
    const auto& hold = folds[static_cast<size_t>(f)];
    if (hold.empty()) throw Error("nodewise", "cv_select_lambda_j: empty fold");
    std::vector<char> is_hold(static_cast<size_t>(n), 0);
    for (int i : hold) is_hold[static_cast<size_t>(i)] = 1;
    const Eigen::Index ntr = n - static_cast<Eigen::Index>(hold.size());
    Eigen::MatrixXd Dtr(ntr, p - 1), Dho(static_cast<Eigen::Index>(hold.size()), p - 1);
    Eigen::VectorXd ytr(ntr), yho(static_cast<Eigen::Index>(hold.size()));
    Eigen::Index rt = 0, rh = 0;
    for (int i = 0; i < n; ++i) {
      Eigen::Index col = 0;
      Eigen::RowVectorXd row(p - 1);
      for (Eigen::Index l = 0; l < p; ++l) {
        if (l == j) continue;
        row[col++] = W.W(i, l);
      }
      if (is_hold[static_cast<size_t>(i)]) {
        Dho.row(rh) = row;
        yho[rh++] = W.W(i, j);
      } else {
        Dtr.row(rt) = row;
        ytr[rt++] = W.W(i, j);
      }
    }
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p - 1);
    for (Eigen::Index g = 0; g < m; ++g) {
      LassoResult lr = lasso_cd(Dtr, ytr, grid[g], {}, &warm);
      warm = lr.gamma;
      cv(f, g) = (yho - Dho * lr.gamma).squaredNorm() / static_cast<double>(hold.size());
    }
  }

  Eigen::VectorXd mean = cv.colwise().mean();
  Eigen::Index imin = 0;
  for (Eigen::Index g = 1; g < m; ++g)
    if (mean[g] < mean[imin]) imin = g;
  double ss = (cv.col(imin).array() - mean[imin]).square().sum();
  double se = (k > 1 ? std::sqrt(ss / (k - 1)) : 0.0) / std::sqrt(static_cast<double>(k));
  const double threshold = mean[imin] + se;
  for (Eigen::Index g = 0; g < m; ++g)
    if (mean[g] <= threshold) return grid[g];
  return grid[imin];
}

Eigen::VectorXd default_nodewise_grid(const ActiveWeights& W, int j, int size,
                                      double min_ratio) {
  const Eigen::Index n = W.n(), p = W.p();
  if (j < 0 || j >= p) throw Error("nodewise", "default_nodewise_grid: bad column index");
  // Full-shrinkage threshold: gamma = 0 iff lambda >= max_k |n^{-1} d_k' y|.
  double lmax = 0.0;
  for (Eigen::Index l = 0; l < p; ++l) {
    if (l == j) continue;
    lmax = std::max(lmax, std::fabs(W.W.col(l).dot(W.W.col(j))) / static_cast<double>(n));
  }
  if (lmax <= 0.0) lmax = 1.0;
  Eigen::VectorXd grid(size);
  if (size == 1) {
    grid[0] = lmax;
    return grid;
  }
  const double la = std::log(lmax), lb = std::log(lmax * min_ratio);
  for (int g = 0; g < size; ++g)
    grid[g] = std::exp(la + (lb - la) * static_cast<double>(g) / (size - 1));
  return grid;
}

}  // namespace censee
