#pragma once

#include <Eigen/Dense>

#include "censee/model.hpp"
#include "censee/rng.hpp"

namespace censee::testutil {

inline Eigen::MatrixXd random_matrix(Rng& rng, int n, int p, double scale = 1.0) {
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = scale * rng.normal();
  return X;
}

inline Eigen::VectorXd random_vector(Rng& rng, int n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

// Small zero-censored sample with ~frac of latent responses censored at the
// empirical quantile.
inline Dataset censored_dataset(Rng& rng, int n, int p, const Eigen::VectorXd& beta,
                                double frac) {
  Dataset d;
  d.X = random_matrix(rng, n, p);
  Eigen::VectorXd latent = d.X * beta + random_vector(rng, n);
  std::vector<double> sorted(latent.data(), latent.data() + n);
  std::sort(sorted.begin(), sorted.end());
  double c = sorted[static_cast<size_t>(frac * n)];
  d.y = (latent.array() - c).cwiseMax(0.0);
  d.censor_level = 0.0;
  return d;
}

}  // namespace censee::testutil
