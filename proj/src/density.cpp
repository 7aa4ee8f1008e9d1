#include "censee/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "censee/errors.hpp"
#include "censee/rng.hpp"

namespace censee {

double adaptive_bandwidth(const Dataset& d, const CoefVector& beta_hat, double c,
                          BandwidthExponent exponent) {
  if (c <= 0.0) throw Error("density", "adaptive_bandwidth: c must be > 0");
  const Eigen::Index n = d.n();
  const double logp_n = std::log(static_cast<double>(d.p())) / static_cast<double>(n);
  const double cutoff = std::sqrt(logp_n);

  Eigen::VectorXd index = d.X * beta_hat.beta;
  std::vector<double> resid;
  resid.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (index[i] <= 0.0) continue;
    double r = d.y[i] - index[i];
    if (r > cutoff) resid.push_back(r);
  }
  if (resid.empty())
    throw Error("density", "bandwidth-degenerate: no qualifying residuals");

  std::sort(resid.begin(), resid.end());
  size_t mid = resid.size() / 2;
  double med = resid.size() % 2 == 1 ? resid[mid]
                                     : 0.5 * (resid[mid - 1] + resid[mid]);

  int s = std::max(1, beta_hat.nnz());
  double rate = static_cast<double>(s) * std::log(static_cast<double>(d.p())) /
                static_cast<double>(n);
  double expo = exponent == BandwidthExponent::plus_third ? 1.0 / 3.0 : -1.0 / 3.0;
  return c * std::pow(rate, expo) * med;
}

DensityEstimate estimate_f0(const Dataset& d, const CoefVector& beta_hat, double h) {
  if (h <= 0.0) throw Error("density", "estimate_f0: bandwidth must be > 0");
  Eigen::VectorXd index = d.X * beta_hat.beta;
  int active = 0, in_window = 0;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    if (index[i] <= 0.0) continue;
    ++active;
    double r = d.y[i] - index[i];
    if (r >= 0.0 && r <= h) ++in_window;
  }
  if (active == 0)
    throw Error("density", "degenerate-active-set: no observation with x_i beta_hat > 0");
  DensityEstimate est;
  est.bandwidth = h;
  est.n_active = active;
  est.f0 = static_cast<double>(in_window) / (h * static_cast<double>(active));
  return est;
}

DensityEstimate split_estimate_f0(const Dataset& d,
                                  const std::function<CoefVector(const Dataset&)>& fit,
                                  double c, std::uint64_t seed, BandwidthExponent exponent) {
  const int n = static_cast<int>(d.n());
  if (n < 20) throw Error("density", "split_estimate_f0: need n >= 20");

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x5b117));
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
  const int na = n / 2;
  auto subset = [&](int lo, int hi) {
    Dataset s;
    s.censor_level = d.censor_level;
    s.X.resize(hi - lo, d.p());
    s.y.resize(hi - lo);
    for (int r = lo; r < hi; ++r) {
      s.X.row(r - lo) = d.X.row(order[static_cast<size_t>(r)]);
      s.y[r - lo] = d.y[order[static_cast<size_t>(r)]];
    }
    return s;
  };
  Dataset half_a = subset(0, na);
  Dataset half_b = subset(na, n);

  try {
    CoefVector beta = fit(half_a);
    double h = adaptive_bandwidth(half_b, beta, c, exponent);
    DensityEstimate est = estimate_f0(half_b, beta, h);
    est.split_used = true;
    return est;
  } catch (const Error& e) {
    throw Error(e.stage(), std::string(e.what()) + " [sample split: fit half " +
                               std::to_string(na) + ", estimate half " +
                               std::to_string(n - na) + "]");
  }
}

}  // namespace censee
