// Command-line front end: simulate / fit / ci / coverage with JSON + CSV
// reports. All randomness flows from --seed; repeated invocations with the
// same arguments produce byte-identical outputs.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "censee/csv_io.hpp"
#include "censee/errors.hpp"
#include "censee/reports.hpp"
#include "censee/threading.hpp"

using namespace censee;

namespace {

struct CommonCi {
  std::string scheme = "see";
  std::string psi = "sign";
  double huber_k = 1.345;
  double alpha = 0.025;
  int cv_folds = 5;
  int grid_size = 50;
  double grid_min_ratio = 0.01;
  double density_c = 10.0;
  bool paper_lp = false;
  bool no_split = false;
  bool split = false;
  std::string bandwidth_exponent = "plus";
  bool force_unit_weights = false;
  bool one_step_minus = false;
  std::vector<int> unpenalized;  // 1-based column indices
};

void add_ci_flags(CLI::App* cmd, CommonCi& c) {
  cmd->add_option("--scheme", c.scheme, "see | mallows | hillryan | schweppes")
      ->default_val("see");
  cmd->add_option("--psi", c.psi, "sign | huber (robust schemes)")->default_val("sign");
  cmd->add_option("--huber-k", c.huber_k, "Huber constant")->default_val(1.345);
  cmd->add_option("--alpha", c.alpha, "one-sided alpha; intervals are (1-2a)100%")
      ->default_val(0.025);
  cmd->add_option("--cv-folds", c.cv_folds)->default_val(5);
  cmd->add_option("--grid-size", c.grid_size, "lambda grid points")->default_val(50);
  cmd->add_option("--grid-min-ratio", c.grid_min_ratio)->default_val(0.01);
  cmd->add_option("--density-c", c.density_c, "adaptive bandwidth constant")
      ->default_val(10.0);
  cmd->add_flag("--paper-lp", c.paper_lp, "solve CLAD with the verbatim LP relaxation");
  cmd->add_flag("--split", c.split, "force sample-split density estimation");
  cmd->add_flag("--no-split", c.no_split, "disable sample-split density estimation");
  cmd->add_option("--bandwidth-exponent", c.bandwidth_exponent, "plus | minus")
      ->default_val("plus");
  cmd->add_flag("--force-unit-weights", c.force_unit_weights,
                "robust schemes with q = v = 1 (reduction check)");
  cmd->add_flag("--one-step-minus", c.one_step_minus,
                "debug: use the minus sign in the one-step correction");
  cmd->add_option("--unpenalized", c.unpenalized,
                  "1-based covariate columns exempt from the l1 penalty");
}

PipelineConfig make_pipeline_config(const CommonCi& c, std::uint64_t seed, int threads,
                                    Eigen::Index p, bool split_default) {
  PipelineConfig pc;
  pc.scheme = scheme_from_name(c.scheme);
  pc.psi.kind = c.psi == "huber" ? PsiSpec::Kind::huber : PsiSpec::Kind::sign;
  if (c.psi != "huber" && c.psi != "sign")
    throw Error("config", "unknown psi kind: " + c.psi);
  pc.psi.k = c.huber_k;
  pc.alpha = c.alpha;
  pc.cv_folds = c.cv_folds;
  pc.grid_size = c.grid_size;
  pc.grid_min_ratio = c.grid_min_ratio;
  pc.density_c = c.density_c;
  pc.split_density = split_default;
  if (c.split) pc.split_density = true;
  if (c.no_split) pc.split_density = false;
  if (c.bandwidth_exponent == "minus")
    pc.bandwidth_exponent = BandwidthExponent::minus_third;
  else if (c.bandwidth_exponent != "plus")
    throw Error("config", "bandwidth-exponent must be plus or minus");
  pc.clad_mode = c.paper_lp ? CladMode::paper_lp : CladMode::active_set;
  pc.force_unit_weights = c.force_unit_weights;
  pc.one_step_minus = c.one_step_minus;
  pc.seed = seed;
  pc.threads = threads;
  if (!c.unpenalized.empty()) {
    pc.penalize.assign(static_cast<size_t>(p), true);
    for (int col : c.unpenalized) {
      if (col < 1 || col > static_cast<int>(p))
        throw Error("config", "--unpenalized column out of range: " + std::to_string(col));
      pc.penalize[static_cast<size_t>(col - 1)] = false;
    }
  }
  return pc;
}

std::string widths_csv(const CoverageReport& rep) {
  std::string out = "rep,signal_coverage,noise_coverage,mean_width_signal,mean_width_noise\n";
  for (const auto& row : rep.per_rep) {
    out += format_double(row[0]);
    for (int c = 1; c < 5; ++c) out += "," + format_double(row[c]);
    out += "\n";
  }
  return out;
}

std::string intervals_csv(const PipelineResult& pr) {
  std::string out = "coordinate,beta_hat,beta_tilde,lower,upper,width\n";
  for (Eigen::Index j = 0; j < pr.report.lower.size(); ++j) {
    out += std::to_string(j + 1);
    out += "," + format_double(pr.beta_hat.beta[j]);
    out += "," + format_double(pr.report.beta_tilde.beta[j]);
    out += "," + format_double(pr.report.lower[j]);
    out += "," + format_double(pr.report.upper[j]);
    out += "," + format_double(pr.report.widths[j]);
    out += "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased confidence intervals for high-dimensional left-censored "
               "(Tobit-I) regression"};
  app.require_subcommand(1);

  int threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--threads", threads, "worker cap (0 = hardware)")->default_val(0);
  app.add_option("--seed", seed, "master seed")->default_val(1);

  // --- simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "generate a left-censored dataset");
  SimConfig sim_cfg;
  std::string sim_design = "toeplitz", sim_error = "normal";
  std::string sim_out = "dataset.csv", sim_truth = "truth.json";
  sim->add_option("--n", sim_cfg.n)->default_val(300);
  sim->add_option("--p", sim_cfg.p)->default_val(40);
  sim->add_option("--s", sim_cfg.s, "number of leading signal coordinates")->default_val(3);
  sim->add_option("--signal", sim_cfg.signal)->default_val(1.0);
  sim->add_option("--design", sim_design, "identity | toeplitz")->default_val("toeplitz");
  sim->add_option("--rho", sim_cfg.rho)->default_val(0.4);
  sim->add_option("--error", sim_error, "normal | student4 | beta23 | weibull")
      ->default_val("normal");
  sim->add_option("--censor-frac", sim_cfg.censor_frac)->default_val(0.25);
  sim->add_flag("--weibull-swapped", sim_cfg.weibull_swapped,
                "read the Weibull parameters as (scale, shape)");
  sim->add_option("--out", sim_out, "dataset CSV path")->default_val("dataset.csv");
  sim->add_option("--truth-out", sim_truth, "truth JSON path")->default_val("truth.json");

  // --- fit --------------------------------------------------------------
  auto* fitc = app.add_subcommand("fit", "penalized CLAD fit");
  std::string fit_in, fit_out = "fit.json";
  double fit_lambda = -1.0;
  CommonCi fit_common;
  fitc->add_option("--input", fit_in, "dataset CSV")->required();
  fitc->add_option("--out", fit_out)->default_val("fit.json");
  fitc->add_option("--lambda", fit_lambda,
                   "fixed penalty (omit to cross-validate)");
  add_ci_flags(fitc, fit_common);

  // --- ci ----------------------------------------------------------------
  auto* cic = app.add_subcommand("ci", "one-step estimates and confidence intervals");
  std::string ci_in, ci_out = "ci.json", ci_csv = "";
  CommonCi ci_common;
  cic->add_option("--input", ci_in, "dataset CSV")->required();
  cic->add_option("--out", ci_out)->default_val("ci.json");
  cic->add_option("--csv-out", ci_csv, "per-coordinate interval CSV (optional)");
  add_ci_flags(cic, ci_common);

  // --- coverage ----------------------------------------------------------
  auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage study");
  SimConfig cov_cfg;
  std::string cov_design = "toeplitz", cov_error = "normal";
  std::string cov_out = "coverage.json", cov_csv = "";
  CommonCi cov_common;
  cov->add_option("--n", cov_cfg.n)->default_val(300);
  cov->add_option("--p", cov_cfg.p)->default_val(40);
  cov->add_option("--s", cov_cfg.s)->default_val(3);
  cov->add_option("--signal", cov_cfg.signal)->default_val(1.0);
  cov->add_option("--design", cov_design)->default_val("toeplitz");
  cov->add_option("--rho", cov_cfg.rho)->default_val(0.4);
  cov->add_option("--error", cov_error)->default_val("normal");
  cov->add_option("--censor-frac", cov_cfg.censor_frac)->default_val(0.25);
  cov->add_option("--reps", cov_cfg.reps)->default_val(100);
  cov->add_flag("--weibull-swapped", cov_cfg.weibull_swapped);
  cov->add_option("--out", cov_out)->default_val("coverage.json");
  cov->add_option("--widths-out", cov_csv, "per-replication CSV (optional)");
  add_ci_flags(cov, cov_common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      sim_cfg.design = design_from_name(sim_design);
      sim_cfg.error = error_from_name(sim_error);
      sim_cfg.seed = seed;
      Rng rng(mix_seed(seed, 0x9e0));  // replication-0 stream
      auto [d, truth] = gen_dataset(sim_cfg, rng);
      write_csv(d, sim_out);
      Json cfg = sim_config_json(sim_cfg);
      write_text(sim_truth, truth_report(truth, -truth.beta[0], cfg).dump(2) + "\n");
      return 0;
    }

    if (*fitc) {
      Dataset d = zero_censor_transform(parse_csv(fit_in));
      d.validate();
      PipelineConfig pc = make_pipeline_config(fit_common, seed, resolve_threads(threads),
                                               d.p(), false);
      FitOptions opts;
      opts.mode = pc.clad_mode;
      opts.penalize = pc.penalize;
      double lambda = fit_lambda;
      Json cfg = pipeline_config_json(pc);
      cfg["input"] = fit_in;
      if (lambda < 0.0) {
        Eigen::VectorXd grid =
            default_lambda_grid(d, pc.penalize, pc.grid_size, pc.grid_min_ratio);
        auto [lh, curve] = cv_select_lambda(d, grid, pc.cv_folds, mix_seed(seed, 1), opts);
        lambda = lh;
        cfg["lambda_source"] = "cv-one-sd";
      } else {
        cfg["lambda_source"] = "fixed";
      }
      FitResult fit = fit_clad(d, lambda, opts);
      write_text(fit_out, fit_report(fit, cfg).dump(2) + "\n");
      return 0;
    }

    if (*cic) {
      Dataset d = parse_csv(ci_in);
      PipelineConfig pc = make_pipeline_config(ci_common, seed, resolve_threads(threads),
                                               d.p(), false);
      PipelineResult pr = full_pipeline(d, pc);
      Json cfg = pipeline_config_json(pc);
      cfg["input"] = ci_in;
      write_text(ci_out, ci_report(pr, d.n(), d.p(), cfg).dump(2) + "\n");
      if (!ci_csv.empty()) write_text(ci_csv, intervals_csv(pr));
      return 0;
    }

    if (*cov) {
      cov_cfg.design = design_from_name(cov_design);
      cov_cfg.error = error_from_name(cov_error);
      cov_cfg.seed = seed;
      cov_cfg.threads = resolve_threads(threads);
      cov_cfg.alpha = cov_common.alpha;
      cov_cfg.scheme = scheme_from_name(cov_common.scheme);
      cov_cfg.pipeline = make_pipeline_config(cov_common, seed, 1, cov_cfg.p + 1, true);
      CoverageReport rep = coverage_study(cov_cfg);
      write_text(cov_out, coverage_report(rep).dump(2) + "\n");
      if (!cov_csv.empty()) write_text(cov_csv, widths_csv(rep));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << error_report(e.stage(), e.what()).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_report("internal", e.what()).dump() << "\n";
    return 2;
  }
  return 1;
}
