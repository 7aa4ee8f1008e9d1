#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "censee/inference.hpp"
#include "censee/model.hpp"
#include "censee/rng.hpp"

namespace censee {

enum class DesignKind { identity, toeplitz };
enum class ErrorKind { normal, student4, beta23, weibull };

std::string design_name(DesignKind k);
DesignKind design_from_name(const std::string& s);
std::string error_name(ErrorKind k);
ErrorKind error_from_name(const std::string& s);

struct SimConfig {
  int n = 300;
  int p = 40;
  int s = 3;
  double signal = 1.0;
  DesignKind design = DesignKind::toeplitz;
  double rho = 0.4;
  ErrorKind error = ErrorKind::normal;
  double censor_frac = 0.25;
  int reps = 100;
  double alpha = 0.025;
  std::uint64_t seed = 1;
  Scheme scheme = Scheme::see;
  // Alternative reading of the Weibull parameters (scale, shape) instead of
  // (shape, scale).
  bool weibull_swapped = false;
  int pilot_draws = 100000;
  int threads = 1;
  PipelineConfig pipeline;  // scheme/alpha/seed filled per replication
};

struct RepFailure {
  int rep = 0;
  std::string stage;
  std::string message;
};

struct CoverageReport {
  double signal_coverage = 0.0;
  double noise_coverage = 0.0;
  double mean_width_signal = 0.0;
  double mean_width_noise = 0.0;
  int reps_completed = 0;
  int reps_requested = 0;
  double max_kkt_gap = 0.0;
  std::vector<RepFailure> failures;
  // Per completed replication: [rep index, signal coverage, noise coverage,
  // mean signal width, mean noise width] for plot-ready CSV output.
  std::vector<std::array<double, 5>> per_rep;
  SimConfig config;
};

// Rows i.i.d. N(0, Sigma), Sigma = I or Sigma_ij = rho^|i-j| (Cholesky).
Eigen::MatrixXd gen_design(int n, int p, DesignKind design, double rho, Rng& rng);

// Centered error draws.
Eigen::VectorXd gen_errors(int n, ErrorKind kind, Rng& rng, bool weibull_swapped = false);

// Left-censored sample: censor threshold calibrated as the empirical
// censor_frac-quantile of pilot latent draws, then zero-censored and
// intercept-augmented (true intercept -c_q, unpenalized, excluded from
// coverage accounting). Returns the dataset and the augmented truth.
std::pair<Dataset, CoefVector> gen_dataset(const SimConfig& cfg, Rng& rng);

CoverageReport coverage_study(const SimConfig& cfg);

}  // namespace censee
