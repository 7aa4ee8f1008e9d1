#pragma once

namespace censee {

// Standard normal CDF.
double norm_cdf(double x);

// Standard normal quantile, |error| <= 1e-10 (Acklam initializer + Newton
// polish against norm_cdf).
double norm_quantile(double p);

// Upper-alpha point z_alpha = Phi^{-1}(1 - alpha).
double z_upper(double alpha);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Quantile of chi-square with df degrees of freedom at lower probability
// prob, |error| <= 1e-8.
double chi_square_quantile(int df, double prob);

}  // namespace censee
