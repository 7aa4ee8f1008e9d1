#include "censee/inference.hpp"

#include <cmath>

#include "censee/errors.hpp"
#include "censee/rng.hpp"
#include "censee/stats.hpp"
#include "censee/threading.hpp"

namespace censee {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::see: return "see";
    case Scheme::mallows: return "mallows";
    case Scheme::hillryan: return "hillryan";
    case Scheme::schweppes: return "schweppes";
  }
  return "see";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "see") return Scheme::see;
  if (name == "mallows") return Scheme::mallows;
  if (name == "hillryan") return Scheme::hillryan;
  if (name == "schweppes") return Scheme::schweppes;
  throw Error("config", "unknown scheme: " + name);
}

double psi_eval(const PsiSpec& spec, double z) {
  if (spec.kind == PsiSpec::Kind::sign) return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
  return std::clamp(z, -spec.k, spec.k);
}

double psi_deriv(const PsiSpec& spec, double z, double f0) {
  if (spec.kind == PsiSpec::Kind::sign) return 2.0 * f0;
  return std::fabs(z) <= spec.k ? 1.0 : 0.0;
}

CoefVector one_step(const CoefVector& beta_hat, const PrecisionEstimate& omega,
                    const Eigen::VectorXd& psi_vec, double f0) {
  if (f0 <= 0.0) throw Error("inference", "one_step: f0 must be > 0");
  if (omega.omega.cols() != beta_hat.beta.size() || psi_vec.size() != beta_hat.beta.size())
    throw Error("inference", "one_step: dimension mismatch");
  return CoefVector(beta_hat.beta + omega.omega * psi_vec / (2.0 * f0));
}

namespace {

IntervalReport studentized_intervals(const CoefVector& center,
                                     const PrecisionEstimate& omega,
                                     const Eigen::MatrixXd& middle, double alpha,
                                     double denom, double f0, Scheme scheme) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw Error("inference", "confidence intervals: alpha must be in (0, 1/2)");
  const Eigen::Index p = center.beta.size();
  if (omega.omega.rows() != p || middle.rows() != p || middle.cols() != p)
    throw Error("inference", "confidence intervals: dimension mismatch");
  const double z = z_upper(alpha);
  IntervalReport rep;
  rep.beta_tilde = center;
  rep.lower.resize(p);
  rep.upper.resize(p);
  rep.widths.resize(p);
  rep.alpha = alpha;
  rep.scheme = scheme;
  rep.f0 = f0;
  for (Eigen::Index j = 0; j < p; ++j) {
    double var = omega.omega.row(j) * middle * omega.omega.row(j).transpose();
    if (var < 0.0) {
      if (var < -1e-10)
        throw Error("inference", "negative studentizing variance at coordinate " +
                                     std::to_string(j));
      var = 0.0;
    }
    double a = z * std::sqrt(var) / denom;
    rep.lower[j] = center.beta[j] - a;
    rep.upper[j] = center.beta[j] + a;
    rep.widths[j] = 2.0 * a;
  }
  return rep;
}

}  // namespace

IntervalReport confidence_intervals(const CoefVector& beta_tilde,
                                    const PrecisionEstimate& omega,
                                    const Eigen::MatrixXd& sigma, double f0, double alpha,
                                    Eigen::Index n) {
  if (f0 <= 0.0) throw Error("inference", "confidence_intervals: f0 must be > 0");
  const double denom = 2.0 * std::sqrt(static_cast<double>(n)) * f0;
  return studentized_intervals(beta_tilde, omega, sigma, alpha, denom, f0, Scheme::see);
}

RobustWeights robust_weights(const ActiveWeights& W, const CoefVector& beta_hat,
                             const PrecisionEstimate& omega, Scheme scheme) {
  const Eigen::Index n = W.n();
  RobustWeights wts;
  wts.scheme = scheme;
  wts.q = Eigen::VectorXd::Ones(n);
  wts.v = Eigen::VectorXd::Ones(n);
  if (scheme == Scheme::see) return wts;

  const auto& support = beta_hat.support;
  if (support.empty()) {
    // Degrade gracefully; the caller sees the flag and may warn.
    wts.degraded = true;
    return wts;
  }
  const int s = static_cast<int>(support.size());
  Eigen::MatrixXd ws(n, s);
  for (int c = 0; c < s; ++c) ws.col(c) = W.W.col(support[static_cast<size_t>(c)]);
  Eigen::RowVectorXd wbar = ws.colwise().mean();
  Eigen::MatrixXd omega_ss(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c)
      omega_ss(r, c) = omega.omega(support[static_cast<size_t>(r)],
                                   support[static_cast<size_t>(c)]);

  if (scheme == Scheme::mallows || scheme == Scheme::hillryan) {
    wts.alpha_m = 1.0;
    wts.b = chi_square_quantile(s, 0.95);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd diff = ws.row(i).transpose() - wbar.transpose();
      double qf = diff.dot(omega_ss * diff);
      double qi = 1.0;
      if (qf > 0.0) qi = std::min(1.0, std::pow(wts.b / qf, 0.5 * wts.alpha_m));
      wts.q[i] = qi;
    }
    if (scheme == Scheme::hillryan) wts.v = wts.q;
    return wts;
  }

  // Schweppe's: q_i = 1 / ||Omega_SS (w_iS - wbar)||_2, v_i = 1/q_i.
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd diff = ws.row(i).transpose() - wbar.transpose();
    double norm = (omega_ss * diff).norm();
    double qi;
    if (norm <= 1e-300) {
      qi = 1e6;
      wts.capped = true;
    } else {
      qi = 1.0 / norm;
    }
    wts.q[i] = qi;
    wts.v[i] = 1.0 / qi;
  }
  return wts;
}

namespace {

Eigen::VectorXd censored_residuals(const Dataset& d, const CoefVector& beta_hat,
                                   Eigen::VectorXd& index) {
  index = d.X * beta_hat.beta;
  return d.y - index.cwiseMax(0.0);
}

}  // namespace

Eigen::VectorXd robust_score(const Dataset& d, const CoefVector& beta_hat,
                             const RobustWeights& wts, const PsiSpec& spec) {
  if (d.X.cols() != beta_hat.beta.size())
    throw Error("inference", "robust_score: dimension mismatch");
  const Eigen::Index n = d.n();
  Eigen::VectorXd index;
  Eigen::VectorXd eps = censored_residuals(d, beta_hat, index);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (index[i] <= 0.0) continue;
    double term = wts.q[i] * psi_eval(spec, wts.v[i] * eps[i]);
    if (term != 0.0) out += term * d.X.row(i).transpose();
  }
  return out / static_cast<double>(n);
}

Eigen::MatrixXd upsilon_r_hat(const Dataset& d, const CoefVector& beta_hat,
                              const RobustWeights& wts, const PsiSpec& spec, double f0) {
  if (spec.kind == PsiSpec::Kind::sign && f0 <= 0.0)
    throw Error("inference", "upsilon_r_hat: sign psi needs f0 > 0 for the surrogate");
  const Eigen::Index n = d.n(), p = d.p();
  Eigen::VectorXd index;
  Eigen::VectorXd eps = censored_residuals(d, beta_hat, index);
  Eigen::MatrixXd ups = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (index[i] <= 0.0) continue;  // w_i = 0
    double coef = wts.q[i] * wts.v[i] * psi_deriv(spec, wts.v[i] * eps[i], f0);
    if (coef != 0.0) ups.noalias() += coef * (d.X.row(i).transpose() * d.X.row(i));
  }
  ups /= static_cast<double>(n);
  return 0.5 * (ups + ups.transpose());
}

Eigen::MatrixXd robust_score_covariance(const Dataset& d, const CoefVector& beta_hat,
                                        const RobustWeights& wts, const PsiSpec& spec) {
  const Eigen::Index n = d.n(), p = d.p();
  Eigen::VectorXd index;
  Eigen::VectorXd eps = censored_residuals(d, beta_hat, index);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (index[i] <= 0.0) continue;
    double t = wts.q[i] * psi_eval(spec, wts.v[i] * eps[i]);
    if (t != 0.0) cov.noalias() += (t * t) * (d.X.row(i).transpose() * d.X.row(i));
  }
  cov /= static_cast<double>(n);
  return 0.5 * (cov + cov.transpose());
}

CoefVector robust_one_step(const CoefVector& beta_hat, const PrecisionEstimate& omega_tilde,
                           const Eigen::VectorXd& psi_r) {
  if (omega_tilde.omega.cols() != beta_hat.beta.size() ||
      psi_r.size() != beta_hat.beta.size())
    throw Error("inference", "robust_one_step: dimension mismatch");
  return CoefVector(beta_hat.beta + omega_tilde.omega * psi_r);
}

IntervalReport robust_confidence_intervals(const CoefVector& beta_check,
                                           const PrecisionEstimate& omega_tilde,
                                           const Eigen::MatrixXd& upsilon_r, double alpha,
                                           Eigen::Index n) {
  const double denom = std::sqrt(static_cast<double>(n));
  return studentized_intervals(beta_check, omega_tilde, upsilon_r, alpha, denom, 0.0,
                               Scheme::mallows);
}

PipelineResult full_pipeline(const Dataset& input, const PipelineConfig& cfg) {
  PipelineResult res;
  Dataset d = zero_censor_transform(input);
  d.validate();

  FitOptions fit_opts;
  fit_opts.mode = cfg.clad_mode;
  fit_opts.penalize = cfg.penalize;

  // Step 1: CV-tuned penalized CLAD.
  Eigen::VectorXd grid = cfg.clad_grid
                             ? *cfg.clad_grid
                             : default_lambda_grid(d, cfg.penalize, cfg.grid_size,
                                                   cfg.grid_min_ratio);
  auto [lambda_hat, curve] =
      cv_select_lambda(d, grid, cfg.cv_folds, mix_seed(cfg.seed, 1), fit_opts);
  FitResult fit = fit_clad(d, lambda_hat, fit_opts);
  res.beta_hat = fit.beta_hat;
  res.lambda = lambda_hat;
  res.cv_curve = curve;
  res.clad_iterations = fit.iterations;
  res.clad_converged = fit.converged;

  ActiveWeights W = active_weights(d.X, fit.beta_hat);
  Eigen::MatrixXd sigma = sigma_hat(W);

  // Step 3 (before the precision build: the sign-psi d-weights need f0).
  DensityEstimate dens;
  auto fallback_bandwidth = [&]() {
    // Permitted fallback when no residual qualifies for the adaptive rule:
    // drop the median factor.
    int s = std::max(1, fit.beta_hat.nnz());
    return cfg.density_c *
           std::pow(s * std::log(static_cast<double>(d.p())) / static_cast<double>(d.n()),
                    1.0 / 3.0);
  };
  if (cfg.split_density) {
    auto refit = [&](const Dataset& half) {
      return fit_clad(half, lambda_hat, fit_opts).beta_hat;
    };
    try {
      dens = split_estimate_f0(d, refit, cfg.density_c, mix_seed(cfg.seed, 2),
                               cfg.bandwidth_exponent);
    } catch (const Error& e) {
      if (std::string(e.what()).find("bandwidth-degenerate") == std::string::npos) throw;
      dens = estimate_f0(d, fit.beta_hat, fallback_bandwidth());
    }
  } else {
    double h;
    try {
      h = adaptive_bandwidth(d, fit.beta_hat, cfg.density_c, cfg.bandwidth_exponent);
    } catch (const Error& e) {
      if (std::string(e.what()).find("bandwidth-degenerate") == std::string::npos) throw;
      h = fallback_bandwidth();
    }
    dens = estimate_f0(d, fit.beta_hat, h);
  }
  res.density = dens;
  if (dens.f0 <= 0.0)
    throw Error("density", "estimated f(0) is zero; intervals are undefined");

  // Step 2: per-node CV-tuned penalties.
  const Eigen::Index p = d.p();
  auto select_lambdas = [&](const ActiveWeights& mat) {
    Eigen::VectorXd lambdas(p);
    parallel_for(static_cast<int>(p), cfg.threads, [&](int j) {
      Eigen::VectorXd g = default_nodewise_grid(mat, j, cfg.grid_size, cfg.grid_min_ratio);
      lambdas[j] = cv_select_lambda_j(mat, j, g, cfg.cv_folds,
                                      mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(j)));
    });
    return lambdas;
  };

  const double f0 = dens.f0;
  const Eigen::Index n = d.n();

  if (cfg.scheme == Scheme::see) {
    Eigen::VectorXd lambdas = select_lambdas(W);
    PrecisionEstimate omega = build_precision(W, lambdas, cfg.threads);
    res.nodewise_lambdas = lambdas;
    res.max_kkt_gap = omega.max_kkt_gap;

    Eigen::VectorXd psi = score_psi(d, fit.beta_hat);
    res.score = psi;
    CoefVector beta_tilde =
        cfg.one_step_minus
            ? CoefVector(fit.beta_hat.beta - omega.omega * psi / (2.0 * f0))
            : one_step(fit.beta_hat, omega, psi, f0);
    res.report = confidence_intervals(beta_tilde, omega, sigma, f0, cfg.alpha, n);
    return res;
  }

  // Robust schemes: weights from the plug-in precision, then the weighted
  // nodewise pass, robust score/one-step, sandwich intervals.
  Eigen::VectorXd plain_lambdas = select_lambdas(W);
  PrecisionEstimate omega = build_precision(W, plain_lambdas, cfg.threads);
  res.max_kkt_gap = omega.max_kkt_gap;

  RobustWeights wts = cfg.force_unit_weights
                          ? RobustWeights{Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n),
                                          cfg.scheme, 0.0, 1.0, false, false}
                          : robust_weights(W, fit.beta_hat, omega, cfg.scheme);
  res.weights = wts;

  Eigen::VectorXd index = d.X * fit.beta_hat.beta;
  Eigen::VectorXd eps = d.y - index.cwiseMax(0.0);
  Eigen::VectorXd dvec(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dvec[i] = wts.v[i] * psi_deriv(cfg.psi, wts.v[i] * eps[i], f0);

  Eigen::VectorXd tilde_lambdas;
  {
    // CV on the weighted columns; build the weighted design once.
    ActiveWeights weighted = W;
    for (Eigen::Index i = 0; i < n; ++i) {
      double qd = wts.q[i] * dvec[i];
      if (qd < 0.0) throw Error("inference", "invalid weights: q_i d_i < 0");
      weighted.W.row(i) *= std::sqrt(qd);
    }
    tilde_lambdas = select_lambdas(weighted);
  }
  PrecisionEstimate omega_tilde =
      robust_build_precision(W, wts.q, dvec, tilde_lambdas, cfg.threads);
  res.nodewise_lambdas = tilde_lambdas;
  res.max_kkt_gap = std::max(res.max_kkt_gap, omega_tilde.max_kkt_gap);

  Eigen::VectorXd psi_r = robust_score(d, fit.beta_hat, wts, cfg.psi);
  res.score = psi_r;
  CoefVector beta_check =
      cfg.one_step_minus
          ? CoefVector(fit.beta_hat.beta - omega_tilde.omega * psi_r)
          : robust_one_step(fit.beta_hat, omega_tilde, psi_r);

  Eigen::MatrixXd middle = robust_score_covariance(d, fit.beta_hat, wts, cfg.psi);
  res.report = robust_confidence_intervals(beta_check, omega_tilde, middle, cfg.alpha, n);
  res.report.scheme = cfg.scheme;
  res.report.f0 = f0;
  return res;
}

}  // namespace censee
