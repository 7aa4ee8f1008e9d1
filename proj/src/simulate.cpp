#include "censee/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "censee/errors.hpp"
#include "censee/threading.hpp"

namespace censee {

std::string design_name(DesignKind k) {
  return k == DesignKind::identity ? "identity" : "toeplitz";
}

DesignKind design_from_name(const std::string& s) {
  if (s == "identity") return DesignKind::identity;
  if (s == "toeplitz") return DesignKind::toeplitz;
  throw Error("config", "unknown design: " + s);
}

std::string error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::normal: return "normal";
    case ErrorKind::student4: return "student4";
    case ErrorKind::beta23: return "beta23";
    case ErrorKind::weibull: return "weibull";
  }
  return "normal";
}

ErrorKind error_from_name(const std::string& s) {
  if (s == "normal") return ErrorKind::normal;
  if (s == "student4") return ErrorKind::student4;
  if (s == "beta23") return ErrorKind::beta23;
  if (s == "weibull") return ErrorKind::weibull;
  throw Error("config", "unknown error law: " + s);
}

namespace {

// Gamma(shape k integer, scale 1) via -log of a product of uniforms.
double gamma_int(Rng& rng, int k) {
  double prod = 1.0;
  for (int i = 0; i < k; ++i) prod *= rng.uniform();
  return -std::log(prod);
}

double draw_error(Rng& rng, ErrorKind kind, bool weibull_swapped) {
  switch (kind) {
    case ErrorKind::normal:
      return rng.normal();
    case ErrorKind::student4: {
      // t_4 = Z / sqrt(chi^2_4 / 4); chi^2_4 = 2 Gamma(2,1).
      double z = rng.normal();
      double chi4 = 2.0 * gamma_int(rng, 2);
      return z / std::sqrt(chi4 / 4.0);
    }
    case ErrorKind::beta23: {
      // Beta(2,3) = G2 / (G2 + G3), centered at its mean 2/5.
      double g2 = gamma_int(rng, 2);
      double g3 = gamma_int(rng, 3);
      return g2 / (g2 + g3) - 0.4;
    }
    case ErrorKind::weibull: {
      // (shape 1/2, scale 1/5): X = scale * (-log U)^(1/shape); the mean is
      // scale * Gamma(1 + 1/shape) = 0.2 * Gamma(3) = 0.4.
      double shape = 0.5, scale = 0.2;
      if (weibull_swapped) std::swap(shape, scale);
      double x = scale * std::pow(-std::log(rng.uniform()), 1.0 / shape);
      double mean = scale * std::tgamma(1.0 + 1.0 / shape);
      return x - mean;
    }
  }
  return 0.0;
}

}  // namespace

Eigen::MatrixXd gen_design(int n, int p, DesignKind design, double rho, Rng& rng) {
  Eigen::MatrixXd Z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) Z(i, j) = rng.normal();
  if (design == DesignKind::identity) return Z;
  if (!(std::fabs(rho) < 1.0)) throw Error("simulate", "toeplitz needs |rho| < 1");
  Eigen::MatrixXd Sigma(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) Sigma(i, j) = std::pow(rho, std::abs(i - j));
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success)
    throw Error("simulate", "Cholesky of the Toeplitz covariance failed");
  return Z * llt.matrixU();  // rows ~ N(0, Sigma)
}

Eigen::VectorXd gen_errors(int n, ErrorKind kind, Rng& rng, bool weibull_swapped) {
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e[i] = draw_error(rng, kind, weibull_swapped);
  return e;
}

std::pair<Dataset, CoefVector> gen_dataset(const SimConfig& cfg, Rng& rng) {
  if (cfg.s > cfg.p) throw Error("simulate", "need s <= p");
  if (!(cfg.censor_frac > 0.0 && cfg.censor_frac < 1.0))
    throw Error("simulate", "censor_frac must be in (0,1)");

  // Pilot stream: only the s signal coordinates matter for the latent index.
  Rng pilot_rng = rng.split(0x9107);
  const int s = cfg.s;
  Eigen::MatrixXd chol_s;
  if (cfg.design == DesignKind::toeplitz) {
    Eigen::MatrixXd Sigma(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) Sigma(i, j) = std::pow(cfg.rho, std::abs(i - j));
    chol_s = Eigen::LLT<Eigen::MatrixXd>(Sigma).matrixL();
  }
  std::vector<double> pilot(static_cast<size_t>(cfg.pilot_draws));
  Eigen::VectorXd z(s);
  for (int t = 0; t < cfg.pilot_draws; ++t) {
    for (int j = 0; j < s; ++j) z[j] = pilot_rng.normal();
    double idx;
    if (cfg.design == DesignKind::toeplitz)
      idx = cfg.signal * (chol_s * z).sum();
    else
      idx = cfg.signal * z.sum();
    pilot[static_cast<size_t>(t)] =
        idx + draw_error(pilot_rng, cfg.error, cfg.weibull_swapped);
  }
  // Empirical quantile (order statistic ceil(q N)).
  size_t k = static_cast<size_t>(
      std::ceil(cfg.censor_frac * static_cast<double>(cfg.pilot_draws)));
  k = std::min(std::max<size_t>(k, 1), pilot.size()) - 1;
  std::nth_element(pilot.begin(), pilot.begin() + static_cast<long>(k), pilot.end());
  const double cq = pilot[k];

  Eigen::MatrixXd X = gen_design(cfg.n, cfg.p, cfg.design, cfg.rho, rng);
  Eigen::VectorXd beta_star = Eigen::VectorXd::Zero(cfg.p);
  beta_star.head(s).setConstant(cfg.signal);
  Eigen::VectorXd eps = gen_errors(cfg.n, cfg.error, rng, cfg.weibull_swapped);
  Eigen::VectorXd latent = X * beta_star + eps;

  Dataset d;
  d.X.resize(cfg.n, cfg.p + 1);
  d.X.col(0).setOnes();
  d.X.rightCols(cfg.p) = X;
  d.y = latent.cwiseMax(cq).array() - cq;  // zero-censored
  d.censor_level = 0.0;

  Eigen::VectorXd truth(cfg.p + 1);
  truth[0] = -cq;
  truth.tail(cfg.p) = beta_star;
  return {std::move(d), CoefVector(std::move(truth))};
}

CoverageReport coverage_study(const SimConfig& cfg) {
  if (cfg.reps < 1) throw Error("simulate", "reps must be >= 1");
  CoverageReport rep;
  rep.config = cfg;
  rep.reps_requested = cfg.reps;

  struct Slot {
    bool ok = false;
    double sig_cov = 0.0, noise_cov = 0.0, sig_w = 0.0, noise_w = 0.0, kkt = 0.0;
    std::string stage, message;
  };
  std::vector<Slot> slots(static_cast<size_t>(cfg.reps));

  // Outer parallelism across replications; keep the per-replication pipeline
  // single-threaded so the worker pool is not oversubscribed.
  parallel_for(cfg.reps, cfg.threads, [&](int r) {
    Slot& slot = slots[static_cast<size_t>(r)];
    try {
      Rng rng(mix_seed(cfg.seed, 0x9e0 + static_cast<std::uint64_t>(r)));
      auto [d, truth] = gen_dataset(cfg, rng);

      PipelineConfig pc = cfg.pipeline;
      pc.scheme = cfg.scheme;
      pc.alpha = cfg.alpha;
      pc.seed = mix_seed(cfg.seed, 0xc0f + static_cast<std::uint64_t>(r));
      pc.threads = 1;
      pc.penalize.assign(static_cast<size_t>(cfg.p + 1), true);
      pc.penalize[0] = false;  // intercept

      PipelineResult pr = full_pipeline(d, pc);
      const auto& ir = pr.report;

      // Intercept (coordinate 0) is excluded from the accounting.
      int sig_n = 0, noise_n = 0, sig_c = 0, noise_c = 0;
      double sig_w = 0.0, noise_w = 0.0;
      for (int j = 1; j <= cfg.p; ++j) {
        bool covered = truth.beta[j] >= ir.lower[j] && truth.beta[j] <= ir.upper[j];
        if (j <= cfg.s) {
          ++sig_n;
          sig_c += covered ? 1 : 0;
          sig_w += ir.widths[j];
        } else {
          ++noise_n;
          noise_c += covered ? 1 : 0;
          noise_w += ir.widths[j];
        }
      }
      slot.ok = true;
      slot.sig_cov = sig_n > 0 ? static_cast<double>(sig_c) / sig_n : 0.0;
      slot.noise_cov = noise_n > 0 ? static_cast<double>(noise_c) / noise_n : 0.0;
      slot.sig_w = sig_n > 0 ? sig_w / sig_n : 0.0;
      slot.noise_w = noise_n > 0 ? noise_w / noise_n : 0.0;
      slot.kkt = pr.max_kkt_gap;
    } catch (const Error& e) {
      slot.stage = e.stage();
      slot.message = e.what();
    } catch (const std::exception& e) {
      slot.stage = "internal";
      slot.message = e.what();
    }
  });

  // Fixed-order reduction keeps reports byte-stable under any scheduling.
  double sig_cov = 0.0, noise_cov = 0.0, sig_w = 0.0, noise_w = 0.0;
  for (int r = 0; r < cfg.reps; ++r) {
    const Slot& slot = slots[static_cast<size_t>(r)];
    if (!slot.ok) {
      rep.failures.push_back({r, slot.stage, slot.message});
      continue;
    }
    ++rep.reps_completed;
    sig_cov += slot.sig_cov;
    noise_cov += slot.noise_cov;
    sig_w += slot.sig_w;
    noise_w += slot.noise_w;
    rep.max_kkt_gap = std::max(rep.max_kkt_gap, slot.kkt);
    rep.per_rep.push_back({static_cast<double>(r), slot.sig_cov, slot.noise_cov,
                           slot.sig_w, slot.noise_w});
  }
  if (rep.reps_completed > 0) {
    rep.signal_coverage = sig_cov / rep.reps_completed;
    rep.noise_coverage = noise_cov / rep.reps_completed;
    rep.mean_width_signal = sig_w / rep.reps_completed;
    rep.mean_width_noise = noise_w / rep.reps_completed;
  }
  return rep;
}

}  // namespace censee
