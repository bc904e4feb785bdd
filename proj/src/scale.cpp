#include "kltrack/scale.hpp"

#include <cmath>
#include <string>

#include "kltrack/errors.hpp"

namespace kltrack {

namespace {

constexpr double kNegligibleUpper = 3.1622776601683794e-4;  // 10^-3.5
constexpr double kSmallUpper = 3.1622776601683794e-3;       // 10^-2.5
constexpr double kModerateUpper = 3.1622776601683793e-2;    // 10^-1.5
constexpr double kLargeUpper = 3.1622776601683794e-1;       // 10^-0.5

}  // namespace

const char* to_string(RiskCategory category) {
    switch (category) {
        case RiskCategory::negligible: return "negligible";
        case RiskCategory::small: return "small";
        case RiskCategory::moderate: return "moderate";
        case RiskCategory::large: return "large";
        case RiskCategory::very_large: return "very large";
    }
    return "?";
}

RiskQualification qualify(double kl) {
    if (!(kl >= 0.0)) throw DomainError("qualify: KL value must be non-negative");
    RiskCategory category = RiskCategory::very_large;
    if (kl < kNegligibleUpper) {
        category = RiskCategory::negligible;
    } else if (kl < kSmallUpper) {
        category = RiskCategory::small;
    } else if (kl < kModerateUpper) {
        category = RiskCategory::moderate;
    } else if (kl < kLargeUpper) {
        category = RiskCategory::large;
    }
    return RiskQualification{category, kl};
}

double kl_normal_variance(double sigma_sq) {
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw DomainError("kl_normal_variance: variance must be positive and finite");
    }
    return 0.5 * (std::log(sigma_sq) - 1.0 + 1.0 / sigma_sq);
}

double relative_error(double kl) {
    if (!(kl >= 0.0)) throw DomainError("relative_error: KL value must be non-negative");
    return std::sqrt(-std::expm1(-2.0 * kl));
}

double kl_binary_or(double beta) {
    if (!std::isfinite(beta)) throw DomainError("kl_binary_or: log-odds must be finite");
    // 0.5*(1 + cosh b) == (e^|b| / 4) * (1 + e^-|b|)^2, which avoids overflow.
    const double m = std::fabs(beta);
    return 0.5 * (m - 2.0 * std::log(2.0) + 2.0 * std::log1p(std::exp(-m)));
}

double statistical_risk(int p, int n) {
    if (p < 1 || n < 1) throw DomainError("statistical_risk: require p >= 1 and n >= 1");
    return static_cast<double>(p) / (2.0 * static_cast<double>(n));
}

}  // namespace kltrack
