#include "censee/model.hpp"

#include <cmath>

#include "censee/errors.hpp"

namespace censee {

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw Error("model", "dataset needs n >= 1 and p >= 1");
  if (y.size() != X.rows()) throw Error("model", "y length does not match rows of X");
  if (!X.allFinite() || !y.allFinite() || !std::isfinite(censor_level))
    throw Error("model", "non-finite entries in dataset");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] < censor_level)
      throw Error("model", "observed response below the censoring level at row " +
                               std::to_string(i));
}

CoefVector::CoefVector(Eigen::VectorXd b) : beta(std::move(b)) {
  support.reserve(8);
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) support.push_back(static_cast<int>(j));
}

Dataset zero_censor_transform(const Dataset& d) {
  Dataset out;
  out.X = d.X;
  out.y = d.y.array() - d.censor_level;
  out.censor_level = 0.0;
  return out;
}

ActiveWeights active_weights(const Eigen::MatrixXd& X, const CoefVector& beta) {
  if (X.cols() != beta.beta.size())
    throw Error("model", "active_weights: dimension mismatch between X and beta");
  ActiveWeights out;
  const Eigen::Index n = X.rows();
  Eigen::VectorXd index = X * beta.beta;
  out.W = Eigen::MatrixXd::Zero(n, X.cols());
  out.indicator.assign(static_cast<size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (index[i] > 0.0) {
      out.W.row(i) = X.row(i);
      out.indicator[static_cast<size_t>(i)] = true;
      ++out.n_active;
    }
  }
  return out;
}

double clad_loss(const Dataset& d, const CoefVector& beta) {
  if (d.X.cols() != beta.beta.size())
    throw Error("model", "clad_loss: dimension mismatch");
  Eigen::VectorXd fit = (d.X * beta.beta).cwiseMax(0.0);
  return (d.y - fit).cwiseAbs().mean();
}

Eigen::VectorXd score_psi(const Dataset& d, const CoefVector& beta) {
  if (d.X.cols() != beta.beta.size())
    throw Error("model", "score_psi: dimension mismatch");
  const Eigen::Index n = d.n();
  Eigen::VectorXd index = d.X * beta.beta;
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(d.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (index[i] <= 0.0) continue;  // w_i = 0
    double r = d.y[i] - index[i];
    if (r == 0.0) continue;         // sign(0) = 0
    psi += (r > 0.0 ? 1.0 : -1.0) * d.X.row(i).transpose();
  }
  return psi / static_cast<double>(n);
}

Eigen::MatrixXd sigma_hat(const ActiveWeights& w) {
  Eigen::MatrixXd s = (w.W.transpose() * w.W) / static_cast<double>(w.n());
  return 0.5 * (s + s.transpose());  // exact symmetry
}

}  // namespace censee
