#include "kltrack/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kltrack/errors.hpp"

namespace kltrack {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438187;

// Both branches converge in O(sqrt(a)) terms when x sits near a, so the
// iteration budget scales with the parameters.
int gamma_iteration_budget(double a, double x) {
    const double scale = std::sqrt(std::max(a, x) + 1.0);
    return 1000 + static_cast<int>(12.0 * scale);
}

// P(a,x) by power series, valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    const int budget = gamma_iteration_budget(a, x);
    for (int i = 0; i < budget; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a,x) by modified Lentz continued fraction, for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    const int budget = gamma_iteration_budget(a, x);
    for (int i = 1; i <= budget; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        // one epsilon of movement is the smallest representable progress
        if (std::fabs(delta - 1.0) < 2.3e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Acklam-style rational approximation of the normal quantile, |rel err| ~ 1e-9,
// then polished by Newton below.
double normal_quantile_estimate(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Quantile for p <= 0.5; the left tail keeps full precision through erfc.
double normal_quantile_lower_half(double p) {
    double z = normal_quantile_estimate(p);
    for (int i = 0; i < 2; ++i) {
        const double density = std_normal_pdf(z);
        if (density < 1e-300) break;
        z -= (std_normal_cdf(z) - p) / density;
    }
    return z;
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw DomainError("std_normal_quantile: p must lie in (0,1), got " + std::to_string(p));
    }
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -normal_quantile_lower_half(1.0 - p);
    return normal_quantile_lower_half(p);
}

double gamma_p(double a, double x) {
    if (!(a > 0.0) || std::isnan(x)) {
        throw DomainError("gamma_p: require a > 0 and finite x");
    }
    if (x < 0.0) throw DomainError("gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    const double q = gamma_q_continued_fraction(a, x);
    return q < 1.0 ? 1.0 - q : 0.0;
}

double central_chisq_pdf(double x, int dof) {
    if (dof < 1) throw DomainError("central_chisq_pdf: dof must be >= 1");
    if (std::isnan(x) || x < 0.0) throw DomainError("central_chisq_pdf: x must be non-negative");
    const double half = 0.5 * dof;
    if (x == 0.0) {
        if (dof == 1) return std::numeric_limits<double>::infinity();
        if (dof == 2) return 0.5;
        return 0.0;
    }
    return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) -
                    std::lgamma(half));
}

double central_chisq_cdf(double x, int dof) {
    if (dof < 1) throw DomainError("central_chisq_cdf: dof must be >= 1");
    if (std::isnan(x) || x < 0.0) throw DomainError("central_chisq_cdf: x must be non-negative");
    return gamma_p(0.5 * dof, 0.5 * x);
}

NoncentralChiSq::NoncentralChiSq(int dof_, double noncentrality_)
    : dof(dof_), noncentrality(noncentrality_) {
    if (dof < 1) throw DomainError("NoncentralChiSq: dof must be >= 1");
    if (!(noncentrality >= 0.0) || !std::isfinite(noncentrality)) {
        throw DomainError("NoncentralChiSq: noncentrality must be finite and >= 0");
    }
    // the Poisson mixture walks O(sqrt(noncentrality)) terms; cap where that
    // stays cheap and exact
    if (noncentrality > 1e9) {
        throw DomainError("NoncentralChiSq: noncentrality above 1e9 is not supported");
    }
}

namespace {

// Applies fn(j, poisson_weight) over the Poisson(d/2) indices that matter,
// starting from the modal index and expanding both ways until the neglected
// weight is below 1e-13 per side. The visited index set depends only on the
// noncentrality.
template <typename Fn>
void for_each_poisson_term(double noncentrality, Fn&& fn) {
    const double half = 0.5 * noncentrality;
    const long long j_mode = static_cast<long long>(std::floor(half));
    const double log_w_mode = -half + (j_mode > 0 ? j_mode * std::log(half) : 0.0) -
                              std::lgamma(static_cast<double>(j_mode) + 1.0);
    const double w_mode = std::exp(log_w_mode);

    fn(j_mode, w_mode);
    double w = w_mode;
    for (long long j = j_mode; j >= 1; --j) {
        w *= static_cast<double>(j) / half;
        if (w < 1e-17) break;
        fn(j - 1, w);
    }
    w = w_mode;
    for (long long j = j_mode + 1; j < j_mode + 2000000; ++j) {
        w *= half / static_cast<double>(j);
        if (w < 1e-17) break;
        fn(j, w);
    }
}

}  // namespace

double noncentral_chisq_pdf(double x, const NoncentralChiSq& dist) {
    if (std::isnan(x) || x < 0.0) {
        throw DomainError("noncentral_chisq_pdf: x must be non-negative");
    }
    if (dist.noncentrality == 0.0) return central_chisq_pdf(x, dist.dof);
    if (x == 0.0) {
        if (dist.dof == 1) return std::numeric_limits<double>::infinity();
        if (dist.dof == 2) return 0.5 * std::exp(-0.5 * dist.noncentrality);
        return 0.0;
    }
    const double log_x = std::log(x);
    const double log_2 = std::log(2.0);
    double sum = 0.0;
    for_each_poisson_term(dist.noncentrality, [&](long long j, double w) {
        // central chi-squared density with dof + 2j degrees of freedom
        const double a = 0.5 * dist.dof + static_cast<double>(j);
        sum += w * std::exp((a - 1.0) * log_x - 0.5 * x - a * log_2 - std::lgamma(a));
    });
    return sum;
}

double noncentral_chisq_cdf(double x, const NoncentralChiSq& dist) {
    if (std::isnan(x) || x < 0.0) {
        throw DomainError("noncentral_chisq_cdf: x must be non-negative");
    }
    if (dist.noncentrality == 0.0) return central_chisq_cdf(x, dist.dof);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double half_x = 0.5 * x;
    double sum = 0.0;
    for_each_poisson_term(dist.noncentrality, [&](long long j, double w) {
        sum += w * gamma_p(0.5 * dist.dof + static_cast<double>(j), half_x);
    });
    return sum > 1.0 ? 1.0 : sum;
}

double noncentral_chisq_quantile(double p, const NoncentralChiSq& dist) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw DomainError("noncentral_chisq_quantile: p must lie in (0,1)");
    }
    const double spread = std::sqrt(2.0 * dist.dof + 4.0 * dist.noncentrality);
    double lo = 0.0;
    double hi = dist.dof + dist.noncentrality + 20.0 * spread + 20.0;
    for (int i = 0; i < 200 && noncentral_chisq_cdf(hi, dist) < p; ++i) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 300 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (noncentral_chisq_cdf(mid, dist) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace kltrack
