#pragma once

namespace kltrack {

// Standard normal density.
double std_normal_pdf(double x);

// Standard normal lower-tail probability.
double std_normal_cdf(double x);

// Inverse of the standard normal cdf for p in (0,1).
// Rational approximation refined by Newton steps on the cdf; absolute error
// well below 1e-10 over the whole range representable in double precision.
double std_normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a+1, continued fraction otherwise.
double gamma_p(double a, double x);

// Central chi-squared, dof >= 1.
double central_chisq_pdf(double x, int dof);
double central_chisq_cdf(double x, int dof);

// Non-central chi-squared distribution, the Poisson mixture
//   sum_j e^{-d/2} (d/2)^j / j! * ChiSq(dof + 2j)
// with noncentrality d >= 0. Its mean is dof + d.
struct NoncentralChiSq {
    int dof;
    double noncentrality;

    NoncentralChiSq(int dof_, double noncentrality_);
    double mean() const { return dof + noncentrality; }
};

// Density of the mixture; the Poisson series is truncated with neglected
// tail mass below 1e-12 (bidirectional expansion from the modal index).
double noncentral_chisq_pdf(double x, const NoncentralChiSq& dist);

// Lower-tail probability; same truncation scheme, absolute error <= 1e-9.
// The truncation set depends only on the noncentrality, so the result is
// exactly monotone in x.
double noncentral_chisq_cdf(double x, const NoncentralChiSq& dist);

// Inverse cdf by bracketing bisection; absolute error <= 1e-8 in probability.
double noncentral_chisq_quantile(double p, const NoncentralChiSq& dist);

}  // namespace kltrack
