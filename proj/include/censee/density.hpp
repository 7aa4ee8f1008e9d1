#pragma once

#include <cstdint>
#include <functional>

#include "censee/model.hpp"

namespace censee {

// Remark-4 bandwidth exponent: the printed -1/3 diverges, so +1/3 is the
// default; the alternative reading stays available behind this switch.
enum class BandwidthExponent { plus_third, minus_third };

struct DensityEstimate {
  double f0 = 0.0;        // in [0, 1/bandwidth]
  double bandwidth = 0.0;
  int n_active = 0;       // count of x_i beta_hat > 0
  bool split_used = false;
};

// h = c * (s log p / n)^{1/3} * median{ r_i : r_i > sqrt(log p / n),
// x_i beta_hat > 0 }, with s = ||beta_hat||_0 (s = 1 when beta_hat = 0).
double adaptive_bandwidth(const Dataset& d, const CoefVector& beta_hat, double c,
                          BandwidthExponent exponent = BandwidthExponent::plus_third);

// f_hat(0) = h^{-1} #{i : active, 0 <= y_i - x_i beta_hat <= h} / #active.
DensityEstimate estimate_f0(const Dataset& d, const CoefVector& beta_hat, double h);

// Seeded half-split: refit on half A via `fit`, estimate on half B with the
// adaptive bandwidth.
DensityEstimate split_estimate_f0(const Dataset& d,
                                  const std::function<CoefVector(const Dataset&)>& fit,
                                  double c, std::uint64_t seed,
                                  BandwidthExponent exponent = BandwidthExponent::plus_third);

}  // namespace censee
