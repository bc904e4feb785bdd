#pragma once

#include <string>

namespace kltrack {

// Interpretation scale for Kullback-Leibler risks. The anchor points are the
// decades 1e-4 .. 1e-1; category boundaries sit at the geometric midpoints
// between anchors (10^-3.5, 10^-2.5, 10^-1.5, 10^-0.5).
enum class RiskCategory { negligible, small, moderate, large, very_large };

const char* to_string(RiskCategory category);

struct RiskQualification {
    RiskCategory category;
    double kl_value;
};

// Category of a non-negative KL value under the midpoint thresholds.
RiskQualification qualify(double kl);

// KL risk of a centered normal with variance sigma_sq against a unit-variance
// normal truth: 0.5 * (log s - 1 + 1/s). Zero at s = 1, convex.
double kl_normal_variance(double sigma_sq);

// Relative error made on the probability of a typical underestimated event,
// sqrt(1 - exp(-2 kl)). Close to sqrt(2 kl) for small kl.
double relative_error(double kl);

// KL divergence of a symmetric binary logit model with log-odds beta against
// a fair coin truth: 0.5 * log(0.5 * (1 + cosh beta)). Even in beta.
double kl_binary_or(double beta);

// Statistical risk of estimating p parameters from n observations, p / (2n).
double statistical_risk(int p, int n);

}  // namespace kltrack
