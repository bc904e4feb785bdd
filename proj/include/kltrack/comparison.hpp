#pragma once

#include <Eigen/Dense>
#include <optional>

#include "kltrack/logistic.hpp"
#include "kltrack/scale.hpp"

namespace kltrack {

// How the reference model g relates to the challenger h.
enum class Relation { non_nested, nested_g_in_h };

const char* to_string(Relation relation);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool contains(double v) const { return lower <= v && v <= upper; }
    bool excludes_zero() const { return lower > 0.0 || upper < 0.0; }
};

struct LrTest {
    double stat = 0.0;  // -2 LR = 2 (L_h - L_g)
    int dof = 0;        // q - p
    double pvalue = 1.0;
};

// Full outcome of a model comparison. d_stat estimates the difference of
// risks of g minus h: positive values favor the challenger h. The tracking
// interval covers the risk difference of the two fitted distributions; the
// confidence interval (nested path only) covers the difference of
// misspecification risks of the two model families.
struct ComparisonResult {
    double d_stat = 0.0;
    std::optional<double> omega_hat_sq;  // absent for nested summary inputs
    int n_obs = 0;
    Relation relation = Relation::non_nested;
    double alpha = 0.05;
    Interval tracking_interval;
    std::optional<Interval> confidence_interval;
    std::optional<LrTest> lr;
    RiskQualification qualification{RiskCategory::negligible, 0.0};
    std::optional<int> per_measurement_divisor;
};

// Half the per-observation AIC difference, (AIC_g - AIC_h) / (2n).
double d_statistic(const FittedModel& fit_g, const FittedModel& fit_h);
double d_statistic_from_loglik(double loglik_g, int p, double loglik_h, int q, int n);

// Empirical variance (divisor n) of the pointwise log-likelihood differences.
double omega_hat_sq(const Eigen::VectorXd& contribs_g, const Eigen::VectorXd& contribs_h);

// Normal-approximation interval d +- z_{alpha/2} sqrt(omega_sq / n).
Interval tracking_interval_nonnested(double d, double omega_sq, int n, double alpha);

// Likelihood ratio test of nested fits against the central chi-squared with
// q - p degrees of freedom. Small negative statistics (optimizer slack above
// -1e-6) clamp to zero; anything more negative signals a mis-declared nesting.
LrTest lr_test(const FittedModel& fit_g, const FittedModel& fit_h);
LrTest lr_test_from_loglik(double loglik_g, int p, double loglik_h, int q);

// P-value of "risk difference equals delta0" given the observed -2LR, using
// the non-central chi-squared with noncentrality 2 n delta0. The statistic is
// compared on density ordering: one-sided tail probability when the opposite
// flank has higher density at the matching quantile, doubled otherwise.
double nested_pvalue(double lr_stat, int dof, int n, double delta0);

struct NestedIntervals {
    Interval confidence;  // for the difference of misspecification risks
    Interval tracking;    // bounds shifted by (p - q) / (2n)
};

// Inverts the nested test over delta0 >= 0 at level alpha. The upper bound is
// +infinity when no finite bound exists (possible only at lr_stat ~ 0).
NestedIntervals nested_intervals(double lr_stat, int dof, int n, double alpha);

// Scales d_stat and all interval bounds by 1/m so comparisons of multivariate
// outcomes with m measurements per unit read on the univariate scale. The
// qualification is recomputed from the scaled statistic.
ComparisonResult normalize_per_measurement(ComparisonResult result, int m);

// Full comparison of two fits on the same sample.
ComparisonResult compare(const FittedModel& fit_g, const FittedModel& fit_h, Relation relation,
                         double alpha = 0.05, std::optional<int> per_measurement = std::nullopt);

// Comparison from published summaries (log-likelihoods and parameter counts).
// The non-nested path needs omega_sq for its interval; the nested path does
// not use it.
ComparisonResult compare_summaries(double loglik_g, int p, double loglik_h, int q, int n,
                                   Relation relation, double alpha = 0.05,
                                   std::optional<double> omega_sq = std::nullopt,
                                   std::optional<int> per_measurement = std::nullopt);

}  // namespace kltrack
