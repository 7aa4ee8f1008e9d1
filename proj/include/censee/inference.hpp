#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "censee/clad.hpp"
#include "censee/density.hpp"
#include "censee/model.hpp"
#include "censee/nodewise.hpp"

namespace censee {

enum class Scheme { see, mallows, hillryan, schweppes };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// Odd, nondecreasing, bounded score function.
struct PsiSpec {
  enum class Kind { sign, huber };
  Kind kind = Kind::sign;
  double k = 1.345;  // huber constant
};

double psi_eval(const PsiSpec& spec, double z);
// Classical derivative; for sign psi the smoothed surrogate 2 f0 is returned.
double psi_deriv(const PsiSpec& spec, double z, double f0);

struct RobustWeights {
  Eigen::VectorXd q;  // design downweights
  Eigen::VectorXd v;  // residual downweights
  Scheme scheme = Scheme::see;
  double b = 0.0;        // Mallow's cutoff chi^2_{s,0.95}
  double alpha_m = 1.0;  // Mallow's exponent
  bool capped = false;   // Schweppe's zero-norm cap triggered
  bool degraded = false; // empty support: fell back to q = v = 1
};

struct IntervalReport {
  CoefVector beta_tilde;  // one-step point estimates
  Eigen::VectorXd lower, upper, widths;
  double alpha = 0.0;
  Scheme scheme = Scheme::see;
  double f0 = 0.0;  // SEE studentization only; echoed for robust schemes
};

// One Newton-type correction: beta~ = beta^ + Omega Psi / (2 f0).
CoefVector one_step(const CoefVector& beta_hat, const PrecisionEstimate& omega,
                    const Eigen::VectorXd& psi_vec, double f0);

// a_n(j) = z_alpha sqrt([Omega Sigma Omega']_jj) / (2 sqrt(n) f0).
IntervalReport confidence_intervals(const CoefVector& beta_tilde,
                                    const PrecisionEstimate& omega,
                                    const Eigen::MatrixXd& sigma, double f0, double alpha,
                                    Eigen::Index n);

// Mallow's / Hill-Ryan's / Schweppe's downweights on the fitted support.
RobustWeights robust_weights(const ActiveWeights& W, const CoefVector& beta_hat,
                             const PrecisionEstimate& omega, Scheme scheme);

// Psi^r(beta^) = n^{-1} sum_i q_i psi(v_i eps_i) w_i(beta^)^T.
Eigen::VectorXd robust_score(const Dataset& d, const CoefVector& beta_hat,
                             const RobustWeights& wts, const PsiSpec& spec);

// Upsilon^r(beta^) = n^{-1} sum_i q_i v_i psi'(v_i eps_i) x_i^T w_i(beta^).
Eigen::MatrixXd upsilon_r_hat(const Dataset& d, const CoefVector& beta_hat,
                              const RobustWeights& wts, const PsiSpec& spec, double f0);

// Plug-in covariance of the robust score, n^{-1} sum_i q_i^2 psi^2(v_i eps_i)
// w_i^T w_i; the studentizing middle used by the pipeline (it reduces to
// Sigma_hat at q = v = 1 with sign psi, which Upsilon^r does not).
Eigen::MatrixXd robust_score_covariance(const Dataset& d, const CoefVector& beta_hat,
                                        const RobustWeights& wts, const PsiSpec& spec);

// beta_check = beta^ + Omega~ Psi^r (the 1/(2 f0) factor lives in Omega~'s
// d-weights, via the sign surrogate when psi is non-smooth).
CoefVector robust_one_step(const CoefVector& beta_hat, const PrecisionEstimate& omega_tilde,
                           const Eigen::VectorXd& psi_r);

// a~_n(j) = z_alpha sqrt([Omega~ M Omega~']_jj) / sqrt(n) for the supplied
// middle matrix M.
IntervalReport robust_confidence_intervals(const CoefVector& beta_check,
                                           const PrecisionEstimate& omega_tilde,
                                           const Eigen::MatrixXd& upsilon_r, double alpha,
                                           Eigen::Index n);

struct PipelineConfig {
  Scheme scheme = Scheme::see;
  PsiSpec psi;               // used by robust schemes
  double alpha = 0.025;      // (1 - 2 alpha) coverage
  int cv_folds = 5;
  int grid_size = 50;
  double grid_min_ratio = 0.01;
  std::optional<Eigen::VectorXd> clad_grid;  // override
  double density_c = 10.0;
  bool split_density = true;
  BandwidthExponent bandwidth_exponent = BandwidthExponent::plus_third;
  CladMode clad_mode = CladMode::active_set;
  std::vector<bool> penalize;   // empty = penalize all
  bool force_unit_weights = false;  // reduction testing: q = v = 1
  bool one_step_minus = false;      // debug: the paper's printed minus sign
  std::uint64_t seed = 1;
  int threads = 1;
};

struct PipelineResult {
  IntervalReport report;
  CoefVector beta_hat;
  double lambda = 0.0;
  CvCurve cv_curve;
  Eigen::VectorXd nodewise_lambdas;
  DensityEstimate density;
  double max_kkt_gap = 0.0;
  RobustWeights weights;       // meaningful for robust schemes
  Eigen::VectorXd score;       // Psi or Psi^r actually used
  int clad_iterations = 0;
  bool clad_converged = false;
};

// Steps 1-4: CV-tuned CLAD, per-node CV-tuned precision, (split) density
// estimate, one-step correction and studentized intervals.
PipelineResult full_pipeline(const Dataset& d, const PipelineConfig& cfg);

}  // namespace censee
