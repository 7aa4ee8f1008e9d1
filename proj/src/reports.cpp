#include "censee/reports.hpp"

#include <fstream>

#include "censee/errors.hpp"

namespace censee {

Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json pipeline_config_json(const PipelineConfig& cfg) {
  Json j;
  j["scheme"] = scheme_name(cfg.scheme);
  j["psi"] = cfg.psi.kind == PsiSpec::Kind::sign ? "sign" : "huber";
  j["huber_k"] = cfg.psi.k;
  j["alpha"] = cfg.alpha;
  j["cv_folds"] = cfg.cv_folds;
  j["grid_size"] = cfg.grid_size;
  j["grid_min_ratio"] = cfg.grid_min_ratio;
  j["density_c"] = cfg.density_c;
  j["split_density"] = cfg.split_density;
  j["bandwidth_exponent"] =
      cfg.bandwidth_exponent == BandwidthExponent::plus_third ? "plus" : "minus";
  j["clad_mode"] = cfg.clad_mode == CladMode::paper_lp ? "paper-lp" : "active-set";
  j["force_unit_weights"] = cfg.force_unit_weights;
  j["one_step_minus"] = cfg.one_step_minus;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  Json unpen = Json::array();
  for (size_t i = 0; i < cfg.penalize.size(); ++i)
    if (!cfg.penalize[i]) unpen.push_back(i + 1);  // 1-based columns
  j["unpenalized_columns"] = unpen;
  return j;
}

Json sim_config_json(const SimConfig& cfg) {
  Json j;
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["s"] = cfg.s;
  j["signal"] = cfg.signal;
  j["design"] = design_name(cfg.design);
  j["rho"] = cfg.rho;
  j["error"] = error_name(cfg.error);
  j["censor_frac"] = cfg.censor_frac;
  j["reps"] = cfg.reps;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["scheme"] = scheme_name(cfg.scheme);
  j["weibull_swapped"] = cfg.weibull_swapped;
  j["pilot_draws"] = cfg.pilot_draws;
  j["threads"] = cfg.threads;
  return j;
}

Json fit_report(const FitResult& fit, const Json& config) {
  Json j;
  j["command"] = "fit";
  j["config"] = config;
  Json r;
  r["beta"] = to_json(fit.beta_hat.beta);
  Json sup = Json::array();
  for (int s : fit.beta_hat.support) sup.push_back(s + 1);  // 1-based
  r["support"] = sup;
  r["lambda"] = fit.lambda;
  r["objective"] = fit.objective;
  r["iterations"] = fit.iterations;
  r["converged"] = fit.converged;
  r["mode"] = fit.mode == CladMode::paper_lp ? "paper-lp" : "active-set";
  if (!fit.diagnostic.empty()) r["diagnostic"] = fit.diagnostic;
  j["result"] = r;
  return j;
}

Json ci_report(const PipelineResult& pr, Eigen::Index n, Eigen::Index p,
               const Json& config) {
  Json j;
  j["command"] = "ci";
  j["config"] = config;
  Json r;
  r["n"] = n;
  r["p"] = p;
  r["scheme"] = scheme_name(pr.report.scheme);
  r["alpha"] = pr.report.alpha;
  r["f0"] = pr.density.f0;
  r["bandwidth"] = pr.density.bandwidth;
  r["density_split_used"] = pr.density.split_used;
  r["density_n_active"] = pr.density.n_active;
  r["lambda"] = pr.lambda;
  r["nodewise_lambdas"] = to_json(pr.nodewise_lambdas);
  r["max_kkt_gap"] = pr.max_kkt_gap;
  r["clad_iterations"] = pr.clad_iterations;
  r["clad_converged"] = pr.clad_converged;
  r["beta_hat"] = to_json(pr.beta_hat.beta);
  r["beta_tilde"] = to_json(pr.report.beta_tilde.beta);
  r["lower"] = to_json(pr.report.lower);
  r["upper"] = to_json(pr.report.upper);
  r["widths"] = to_json(pr.report.widths);
  j["result"] = r;
  return j;
}

Json coverage_report(const CoverageReport& rep) {
  Json j;
  j["command"] = "coverage";
  j["config"] = sim_config_json(rep.config);
  Json r;
  r["signal_coverage"] = rep.signal_coverage;
  r["noise_coverage"] = rep.noise_coverage;
  r["mean_width_signal"] = rep.mean_width_signal;
  r["mean_width_noise"] = rep.mean_width_noise;
  r["reps_completed"] = rep.reps_completed;
  r["reps_requested"] = rep.reps_requested;
  r["max_kkt_gap"] = rep.max_kkt_gap;
  Json fails = Json::array();
  for (const auto& f : rep.failures) {
    Json e;
    e["rep"] = f.rep;
    e["stage"] = f.stage;
    e["message"] = f.message;
    fails.push_back(e);
  }
  r["failures"] = fails;
  j["result"] = r;
  return j;
}

Json truth_report(const CoefVector& truth, double censor_threshold, const Json& config) {
  Json j;
  j["command"] = "simulate";
  j["config"] = config;
  Json r;
  r["beta_star"] = to_json(truth.beta);
  r["censor_threshold"] = censor_threshold;
  j["result"] = r;
  return j;
}

Json error_report(const std::string& stage, const std::string& message) {
  Json j;
  j["error"]["stage"] = stage;
  j["error"]["message"] = message;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path);
  out << text;
  if (!out) throw Error("io", "write failed for " + path);
}

}  // namespace censee
